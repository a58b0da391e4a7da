#include <doctest.h>

#include <algorithm>
#include <regex>
#include <set>

#include "bestapprox/error.hpp"
#include "bestapprox/oracle.hpp"
#include "bestapprox/solver.hpp"
#include "support.hpp"

using namespace bestapprox;
using testing::bundled;
using testing::vec;

namespace {

OracleConfig at(int resolution, std::optional<double> match_tol = std::nullopt) {
  OracleConfig cfg;
  cfg.resolution = resolution;
  cfg.match_tol = match_tol;
  return cfg;
}

bool near_profile(const Profile& x, const Profile& target, double tol) {
  return testing::max_abs_diff(x, target) <= tol;
}

std::string key(const Profile& x) {
  std::string s;
  for (const auto& v : x) {
    for (Eigen::Index j = 0; j < v.size(); ++j) s += std::to_string(v[j]) + ",";
    s += ";";
  }
  return s;
}

}  // namespace

TEST_CASE("two-player example has one cluster at ((1,1),(1,1))") {
  const GameInstance inst = bundled("paper-gnep");
  const double h = grid_spacing(inst, 21);
  CHECK(h == doctest::Approx(0.05));
  const OracleResult res = brute_force_gnep(inst, at(21, h));
  REQUIRE_FALSE(res.candidates.empty());
  CHECK(near_profile(res.candidates.front().x, testing::example_x(), 1e-12));
  CHECK(res.candidates.front().residual == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cluster_candidates(res.candidates, h).size() == 1);
  for (const auto& c : res.candidates) {
    CHECK(c.residual <= h);
    CHECK(near_profile(c.x, testing::example_x(), 2 * h));
  }
  for (std::size_t k = 1; k < res.candidates.size(); ++k) {
    CHECK(res.candidates[k - 1].residual <= res.candidates[k].residual);
  }
  CHECK(res.skipped == 0);
}

TEST_CASE("self-map game candidates lie on the diagonal") {
  const GameInstance inst = bundled("selfmap-box");
  const double h = grid_spacing(inst, 21);
  const OracleResult res = brute_force_gnep(inst, at(21, h));
  CHECK(res.candidates.size() >= 21);
  for (const auto& c : res.candidates) CHECK(std::abs(c.x[0][0] - c.x[1][0]) <= h + 1e-12);
  std::set<double> diagonal;
  for (const auto& c : res.candidates) {
    if (c.x[0][0] == c.x[1][0]) diagonal.insert(c.x[0][0]);
  }
  CHECK(diagonal.size() == 21);
}

TEST_CASE("quasi-optimization oracle") {
  const OracleResult res = brute_force_quopt(bundled("paper-quopt"), at(21));
  REQUIRE_FALSE(res.candidates.empty());
  CHECK(res.match_tol == doctest::Approx(0.075));
  const auto clusters = cluster_candidates(res.candidates, res.match_tol);
  CHECK(clusters.size() == 1);
  CHECK(near_profile(res.candidates.front().x, {vec({1, 1})}, 1e-12));

  const GameInstance self = load_instance(R"json({
    "kind": "quopt",
    "players": [{"name": "U", "dim": 1,
      "strategy_set": {"type": "box", "lower": [0], "upper": [1]},
      "seminorm": {"weights": [1]}, "objective": "z_1",
      "constraint_map": {"type": "param_box", "lower": ["0"], "upper": ["x1_1"]}}]
  })json");
  const OracleResult s = brute_force(self, at(11, 0.0));
  CHECK(s.candidates.size() == 11);
  for (const auto& c : s.candidates) CHECK(c.y_hat[0][0] == c.x[0][0]);
}

TEST_CASE("exact matching on a grid that misses the solution") {
  GameInstance inst = bundled("paper-quopt");
  inst.players[0].strategy_set = Ball{vec({0.5, 0.5}), 0.5};
  CHECK(brute_force(inst, at(21, 0.0)).candidates.empty());
  CHECK_FALSE(brute_force(inst, at(21)).candidates.empty());
}

TEST_CASE("budget") {
  OracleConfig cfg = at(1001);
  cfg.budget = 10;
  CHECK_THROWS_AS(brute_force_quopt(bundled("paper-quopt"), cfg), BudgetError);
  cfg = at(21);
  cfg.budget = 10'000'000;
  CHECK(brute_force(bundled("paper-gnep"), cfg).evaluations <= cfg.budget);
}

TEST_CASE("profiles where a constraint set is empty are skipped") {
  GameInstance inst = bundled("selfmap-box");
  std::get<ParamBoxMap>(inst.players[0].constraint_map).lower[0] = parse("0.5");
  const OracleResult res = brute_force(inst, at(11));
  CHECK(res.skipped > 0);
}

TEST_CASE("player order does not matter") {
  std::string text = *catalog_instance("paper-gnep");
  auto j = nlohmann::json::parse(text);
  std::swap(j["players"][0], j["players"][1]);
  text = j.dump();
  text = std::regex_replace(text, std::regex("x1_"), "TMP_");
  text = std::regex_replace(text, std::regex("x2_"), "x1_");
  text = std::regex_replace(text, std::regex("TMP_"), "x2_");
  const GameInstance swapped = load_instance(text);

  const OracleResult a = brute_force(bundled("paper-gnep"), at(21));
  const OracleResult b = brute_force(swapped, at(21));
  std::multiset<std::string> ka, kb;
  for (const auto& c : a.candidates) ka.insert(key(c.x) + "|" + std::to_string(c.residual));
  for (const auto& c : b.candidates) {
    kb.insert(key({c.x[1], c.x[0]}) + "|" + std::to_string(c.residual));
  }
  CHECK(ka == kb);
}

TEST_CASE("solver solutions sit next to oracle candidates") {
  for (const char* name : {"paper-gnep", "paper-quopt", "selfmap-box"}) {
    INFO(name);
    const GameInstance inst = bundled(name);
    SolveConfig cfg;
    if (std::string(name) == "selfmap-box") cfg.damping = 0.5;
    const SolveReport rep = solve(inst, cfg);
    REQUIRE(rep.converged);
    const OracleResult res = brute_force(inst, at(41));
    const double h = res.spacing;
    const bool found = std::any_of(res.candidates.begin(), res.candidates.end(), [&](const OracleCandidate& c) {
      return profile_distance(c.x, rep.solution.x_tilde) <= h + 1e-12;
    });
    CHECK(found);
  }
}

TEST_CASE("clustering") {
  std::vector<OracleCandidate> cs(4);
  cs[0].x = {vec({0.0})};
  cs[1].x = {vec({0.1})};
  cs[2].x = {vec({0.2})};
  cs[3].x = {vec({0.9})};
  const auto cl = cluster_candidates(cs, 0.1 + 1e-12);
  REQUIRE(cl.size() == 2);
  CHECK(cl[0] == std::vector<std::size_t>{0, 1, 2});
  CHECK(cl[1] == std::vector<std::size_t>{3});
}
