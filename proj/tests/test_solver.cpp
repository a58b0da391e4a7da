#include <doctest.h>

#include "bestapprox/certify.hpp"
#include "bestapprox/error.hpp"
#include "bestapprox/report.hpp"
#include "bestapprox/solver.hpp"
#include "support.hpp"

using namespace bestapprox;
using testing::bundled;
using testing::vec;

namespace {

const char* kSelfQuopt = R"json({
  "kind": "quopt",
  "players": [
    {"name": "U", "dim": 1,
     "strategy_set": {"type": "box", "lower": [0], "upper": [1]},
     "seminorm": {"weights": [1]},
     "objective": "z_1",
     "constraint_map": {"type": "param_box", "lower": ["0"], "upper": ["x1_1"]}}
  ]
})json";

bool inside_strategy_sets(const GameInstance& inst, const Profile& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!contains(inst.players[i].strategy_set, x[i], 1e-9)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("two-player example converges to ((1,1),(1,1))") {
  const SolveReport rep = solve(bundled("paper-gnep"), SolveConfig{});
  REQUIRE(rep.converged);
  CHECK(testing::max_abs_diff(rep.solution.x_tilde, testing::example_x()) <= 1e-6);
  CHECK(testing::max_abs_diff(rep.solution.y_tilde, testing::example_y()) <= 1e-6);
  CHECK(rep.iterations == 2);
  CHECK(rep.residuals.pass);
  CHECK(rep.residuals.aggregate <= 1e-6);
  CHECK(rep.seed == 42);
}

TEST_CASE("every start reaches the example solution after one step") {
  const GameInstance inst = bundled("paper-gnep");
  SolveConfig cfg;
  cfg.record_trace = true;
  for (int s = 0; s < 8; ++s) {
    const Profile x0 = initial_point(inst, cfg, s);
    CHECK(inside_strategy_sets(inst, x0));
    const StartOutcome out = run_from(inst, cfg, x0, s);
    REQUIRE(out.trace.size() >= 2);
    CHECK(testing::max_abs_diff(out.trace[1].x, testing::example_x()) <= 1e-9);
    CHECK(out.converged);
    CHECK(out.iterations == 2);
  }
}

TEST_CASE("quasi-optimization example") {
  const SolveReport rep = solve_quopt(bundled("paper-quopt"), SolveConfig{});
  REQUIRE(rep.converged);
  const double r2 = testing::kSqrt2;
  CHECK(testing::max_abs_diff(rep.solution.x_tilde[0], vec({1, 1})) <= 1e-6);
  CHECK(testing::max_abs_diff(rep.solution.y_tilde[0], vec({1 + r2, 1 + r2})) <= 1e-6);
  CHECK_THROWS_AS(solve_gnep(bundled("paper-quopt"), SolveConfig{}), Error);
  CHECK_THROWS_AS(solve_quopt(bundled("paper-gnep"), SolveConfig{}), Error);
}

TEST_CASE("self-map quasi-optimization gives a classical solution") {
  const SolveReport rep = solve(load_instance(kSelfQuopt), SolveConfig{});
  REQUIRE(rep.converged);
  CHECK(testing::max_abs_diff(rep.solution.x_tilde, rep.solution.y_tilde) <= 1e-9);
  CHECK(rep.residuals.players[0].proj_residual == 0.0);
}

TEST_CASE("forced non-convergence") {
  SolveConfig cfg;
  cfg.max_iter = 1;
  cfg.multistart = 1;
  const SolveReport rep = solve(bundled("paper-quopt"), cfg);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.starts_used == 1);
}

TEST_CASE("damped iteration on the self-map game") {
  const GameInstance inst = bundled("selfmap-box");
  SolveConfig cfg;
  cfg.damping = 0.5;
  cfg.record_trace = true;
  const SolveReport rep = solve(inst, cfg);
  REQUIRE(rep.converged);
  CHECK(testing::max_abs_diff(rep.solution.x_tilde, rep.solution.y_tilde) <= 1e-6);
  CHECK(std::abs(rep.solution.x_tilde[0][0] - rep.solution.x_tilde[1][0]) <= 1e-6);
  for (const auto& p : rep.residuals.players) CHECK(p.proj_residual <= 1e-9);
  CHECK(is_classical_gne(inst, rep.solution.x_tilde, 1e-6, solver_response_config(cfg)).is_gne);

  // Off-diagonal starts contract onto the diagonal.
  for (int s = 1; s < 8; ++s) {
    const StartOutcome out = run_from(inst, cfg, initial_point(inst, cfg, s), s);
    CHECK(out.converged);
    const auto& x = out.solution.x_tilde;
    CHECK(std::abs(x[0][0] - x[1][0]) <= 1e-6);
    for (const auto& t : out.trace) CHECK(inside_strategy_sets(inst, t.x));
  }
}

TEST_CASE("empty constraint set at an iterate is a solver error") {
  GameInstance inst = bundled("selfmap-box");
  std::get<ParamBoxMap>(inst.players[0].constraint_map).upper[0] = parse("x2_1 - 0.9");
  try {
    solve(inst, SolveConfig{});
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("player A") != std::string::npos);
    CHECK(msg.find("iteration") != std::string::npos);
  }
}

TEST_CASE("solver invariants across the corpus") {
  for (const auto& name : {"paper-gnep", "paper-quopt", "selfmap-box"}) {
    INFO(name);
    const GameInstance inst = bundled(name);
    SolveConfig cfg;
    cfg.record_trace = true;
    cfg.damping = std::string(name) == "selfmap-box" ? 0.5 : 1.0;
    const SolveReport a = solve(inst, cfg);
    const SolveReport b = solve(inst, cfg);
    CHECK(dump_report(to_json(a, true)) == dump_report(to_json(b, true)));
    for (const auto& t : a.trace) CHECK(inside_strategy_sets(inst, t.x));
    if (a.converged) {
      const CertReport again = certify(inst, a.solution, cfg.tol_cert, solver_response_config(cfg));
      CHECK(again.pass);
      CHECK(a.residuals.aggregate <= cfg.tol_cert);
    }
  }
}

TEST_CASE("configuration checks") {
  SolveConfig cfg;
  cfg.damping = 0.0;
  CHECK_THROWS(check_config(cfg));
  cfg = SolveConfig{};
  cfg.multistart = 0;
  CHECK_THROWS(check_config(cfg));
}
