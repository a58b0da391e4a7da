#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bestapprox/report.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace bestapprox;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const fs::path dir = fs::path(SCRATCH_DIR) / "cli_scratch";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string emit(const std::string& name) {
  const std::string path = scratch(name + ".json");
  REQUIRE(run({"example", "--name", name, "--emit", path}).code == cli::kOk);
  return path;
}

}  // namespace

TEST_CASE("solve") {
  const std::string inst = emit("paper-gnep");
  const std::string report = scratch("paper-gnep.solve.json");
  const Run r = run({"solve", "--instance", inst, "--report", report});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("converged") == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["converged"] == true);
  CHECK(j["x_tilde"] == nlohmann::json::parse("[[1.0, 1.0], [1.0, 1.0]]"));
  CHECK(j["seed"] == 42);
  for (const char* k : {"converged", "x_tilde", "y_tilde", "residuals", "iterations", "seed"}) CHECK(j.contains(k));
  CHECK(slurp(report) == slurp(std::string(GOLDEN_DIR) + "/paper-gnep.solve.json"));

  const Run missing = run({"solve", "--instance", scratch("missing.json")});
  CHECK(missing.code == cli::kUsage);
  CHECK(missing.out.empty());
  CHECK_FALSE(missing.err.empty());

  const Run forced = run({"solve", "--instance", emit("paper-quopt"), "--max-iter", "1", "--starts", "1"});
  CHECK(forced.code == cli::kNotConverged);
  CHECK(forced.out.find("not converged") == 0);

  const std::string traced = scratch("selfmap.solve.json");
  CHECK(run({"solve", "--instance", emit("selfmap-box"), "--damping", "0.5", "--seed", "7", "--trace",
             "--report", traced})
            .code == cli::kOk);
  const auto t = nlohmann::json::parse(slurp(traced));
  CHECK(t["seed"] == 7);
  CHECK(t.contains("trace"));

  CHECK(run({"solve", "--instance", inst, "--damping", "1.5"}).code == cli::kUsage);
  CHECK(run({"solve", "--instance", inst, "--max-iter", "ten"}).code == cli::kUsage);
  CHECK(run({"solve"}).code == cli::kUsage);
}

TEST_CASE("certify") {
  const std::string inst = emit("paper-gnep");
  const std::string good = scratch("good.json");
  spit(good, R"({"x_tilde": [[1, 1], [1, 1]], "y_tilde": [[2.414213562373095, 2.414213562373095], [2, 2]]})");
  const std::string report = scratch("good.cert.json");
  const Run pass = run({"certify", "--instance", inst, "--candidate", good, "--report", report});
  CHECK(pass.code == cli::kOk);
  CHECK(slurp(report) == slurp(std::string(GOLDEN_DIR) + "/paper-gnep.cert.json"));

  const std::string bad = scratch("bad.json");
  spit(bad, R"({"x_tilde": [[1, 1], [1, 1]], "y_tilde": [[1, 1], [1, 1]]})");
  const std::string bad_report = scratch("bad.cert.json");
  CHECK(run({"certify", "--instance", inst, "--candidate", bad, "--report", bad_report}).code == cli::kFailed);
  const auto j = nlohmann::json::parse(slurp(bad_report));
  CHECK(j["pass"] == false);
  CHECK(j["players"][0]["feas_F"].get<double>() > 0.0);

  const std::string wrong = scratch("wrong.json");
  spit(wrong, R"({"x_tilde": [[1, 1]], "y_tilde": [[1, 1]]})");
  const Run mismatch = run({"certify", "--instance", inst, "--candidate", wrong});
  CHECK(mismatch.code == cli::kUsage);
  CHECK(mismatch.out.empty());

  spit(wrong, R"({"x_tilde": [[1, 1], [1, 1]]})");
  CHECK(run({"certify", "--instance", inst, "--candidate", wrong}).code == cli::kUsage);
}

TEST_CASE("oracle") {
  const std::string report = scratch("oracle.json");
  const Run r = run({"oracle", "--instance", emit("paper-gnep"), "--grid", "21", "--report", report});
  CHECK(r.code == cli::kOk);
  const auto j = nlohmann::json::parse(slurp(report));
  REQUIRE(j["candidates"].is_array());
  CHECK(j["candidates"][0]["x"] == nlohmann::json::parse("[[1.0, 1.0], [1.0, 1.0]]"));

  CHECK(run({"oracle", "--instance", emit("paper-quopt"), "--grid", "21", "--match-tol", "0"}).code == cli::kOk);
  const Run budget = run({"oracle", "--instance", emit("paper-quopt"), "--grid", "1001", "--budget", "10"});
  CHECK(budget.code == cli::kUsage);
  CHECK(budget.out.empty());
}

TEST_CASE("example") {
  for (const auto& name : catalog_names()) {
    INFO(name);
    const Run r = run({"example", "--name", name});
    CHECK(r.code == cli::kOk);
    CHECK_NOTHROW(load_instance(r.out));
    CHECK(load_instance(slurp(emit(name))).name() == name);
  }
  const Run unknown = run({"example", "--name", "nope"});
  CHECK(unknown.code == cli::kUsage);
  CHECK(unknown.out.empty());

  const Run solved = run({"solve", "--instance", emit("paper-gnep")});
  CHECK(solved.code == cli::kOk);
  CHECK(solved.out.find("((1, 1), (1, 1))") != std::string::npos);
}

TEST_CASE("diagnose") {
  const Run cube = run({"diagnose", "--instance", emit("cube-quasiconcave"), "--check", "quasiconcave"});
  CHECK(cube.code == cli::kOk);
  const auto j = nlohmann::json::parse(cube.out);
  CHECK(j["pass"] == true);
  CHECK(j["midpoint_concave"] == false);
  CHECK(j["seed"] == 42);

  CHECK(run({"diagnose", "--function", "z_1^2", "--check", "quasiconcave", "--box", "-1,1"}).code == cli::kFailed);
  CHECK(run({"diagnose", "--function", "z_1^3", "--check", "quasiconcave", "--box", "-1,1"}).code == cli::kOk);

  const std::string fpt = emit("fpt-example");
  CHECK(run({"diagnose", "--instance", fpt, "--check", "lsc", "--point", "0,0", "--epsilon", "0.5"}).code ==
        cli::kFailed);
  CHECK(run({"diagnose", "--instance", fpt, "--check", "fptlsc", "--point", "0,0", "--epsilon", "0.5"}).code ==
        cli::kOk);
  CHECK(run({"diagnose", "--function", "u_1 + v_1", "--check", "lsc", "--point", "0,0", "--epsilon", "0.1"}).code ==
        cli::kOk);

  const std::string report = scratch("diag.json");
  const Run to_file = run({"diagnose", "--instance", fpt, "--check", "lsc", "--point", "0,0", "--epsilon", "0.5",
                           "--seed", "9", "--report", report});
  CHECK(to_file.out.empty());
  CHECK(nlohmann::json::parse(slurp(report))["seed"] == 9);

  CHECK(run({"diagnose", "--function", "u_1", "--check", "fptlsc", "--point", "0,0"}).code == cli::kUsage);
  CHECK(run({"diagnose", "--function", "u_1", "--check", "convex"}).code == cli::kUsage);
  CHECK(run({"diagnose", "--instance", fpt, "--check", "lsc", "--point", "0"}).code == cli::kUsage);
  CHECK(run({"diagnose", "--instance", fpt, "--function", "z_1", "--check", "quasiconcave"}).code == cli::kUsage);
}

TEST_CASE("usage") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"solve", "--instance", "x", "--bogus"}).code == cli::kUsage);
  const Run help = run({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("solve") != std::string::npos);
}

TEST_CASE("overflowing numbers in a candidate are load errors") {
  const std::string cand = scratch("overflow.json");
  spit(cand, R"({"x_tilde": [[1, 1], [1, 1e400]], "y_tilde": [[1, 1], [1, 1]]})");
  const Run r = run({"certify", "--instance", emit("paper-gnep"), "--candidate", cand});
  CHECK(r.code == cli::kUsage);
  CHECK(r.out.empty());
}

TEST_CASE("shipped instance files match the registry") {
  for (const auto& name : catalog_names()) {
    INFO(name);
    CHECK(slurp(std::string(INSTANCES_DIR) + "/" + name + ".json") == *catalog_instance(name));
  }
}
