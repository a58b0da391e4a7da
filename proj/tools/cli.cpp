#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bestapprox/catalog.hpp"
#include "bestapprox/certify.hpp"
#include "bestapprox/diagnostics.hpp"
#include "bestapprox/oracle.hpp"
#include "bestapprox/report.hpp"
#include "bestapprox/solver.hpp"

namespace bestapprox::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string short_profile(const Profile& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += i ? ", (" : "(";
    for (Eigen::Index j = 0; j < x[i].size(); ++j) s += (j ? ", " : "") + short_number(x[i][j]);
    s += ")";
  }
  return s + ")";
}

// Options shared by every subcommand that needs them.
struct Options {
  std::string instance;
  std::string candidate;
  std::string report;
  double tol = 1e-6;
  double tol_fp = 1e-8;
  int max_iter = 500;
  int starts = 8;
  double damping = 1.0;
  int grid = 21;
  double match_tol = -1;
  std::size_t budget = 10'000'000;
  std::uint64_t seed = 42;
  std::string name;
  std::string emit;
  std::string check;
  std::string function;
  std::string point;
  double epsilon = 0.1;
  bool trace = false;
  std::string box;
  int player = 1;
  int samples = 0;
};

void emit_report(const Options& o, const nlohmann::json& j, std::ostream& out, bool print_json) {
  const std::string text = dump_report(j);
  if (!o.report.empty()) {
    write_file(o.report, text);
  } else if (print_json) {
    out << text;
  }
}

int cmd_solve(const Options& o, std::ostream& out) {
  const GameInstance inst = load_instance(read_file(o.instance));
  SolveConfig cfg;
  cfg.tol_cert = o.tol;
  cfg.tol_fp = o.tol_fp;
  cfg.max_iter = o.max_iter;
  cfg.multistart = o.starts;
  cfg.damping = o.damping;
  cfg.seed = o.seed;
  cfg.record_trace = o.trace;
  const SolveReport rep = solve(inst, cfg);
  emit_report(o, to_json(rep, o.trace), out, false);
  out << (rep.converged ? "converged" : "not converged") << ": x_tilde = "
      << short_profile(rep.solution.x_tilde) << ", residual " << short_number(rep.residuals.aggregate)
      << ", iterations " << rep.iterations << ", starts " << rep.starts_used << "\n";
  return rep.converged ? kOk : kNotConverged;
}

int cmd_certify(const Options& o, std::ostream& out) {
  const GameInstance inst = load_instance(read_file(o.instance));
  const CandidateSolution cand = load_candidate(read_file(o.candidate));
  ResponseConfig cfg;
  cfg.seed = o.seed;
  const CertReport rep = certify(inst, cand, o.tol, cfg);
  nlohmann::json j = to_json(rep);
  j["seed"] = o.seed;
  emit_report(o, j, out, false);
  out << (rep.pass ? "pass" : "fail") << ": aggregate residual " << short_number(rep.aggregate)
      << " (tol " << short_number(rep.tol) << ")\n";
  return rep.pass ? kOk : kFailed;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const GameInstance inst = load_instance(read_file(o.instance));
  OracleConfig cfg;
  cfg.resolution = o.grid;
  if (o.match_tol >= 0) cfg.match_tol = o.match_tol;
  cfg.budget = o.budget;
  const OracleResult res = brute_force(inst, cfg);
  nlohmann::json j = to_json(res);
  j["seed"] = o.seed;  // the oracle is deterministic; recorded for uniformity
  emit_report(o, j, out, false);
  const auto clusters = cluster_candidates(res.candidates, res.match_tol);
  out << res.candidates.size() << " candidate(s) in " << clusters.size()
      << " cluster(s) at resolution " << res.resolution << ", match_tol "
      << short_number(res.match_tol) << "\n";
  return kOk;
}

int cmd_example(const Options& o, std::ostream& out) {
  auto text = catalog_instance(o.name);
  if (!text) {
    std::string known;
    for (const auto& n : catalog_names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown example '" + o.name + "' (known: " + known + ")");
  }
  if (o.emit.empty()) {
    out << *text;
  } else {
    write_file(o.emit, *text);
  }
  return kOk;
}

SamplingOptions sampling(const Options& o) {
  SamplingOptions s;
  s.seed = o.seed;
  if (o.samples > 0) s.samples = o.samples;
  return s;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  if (o.instance.empty() == o.function.empty()) {
    throw UsageError("diagnose: give exactly one of --instance or --function");
  }
  const std::vector<double> point = o.point.empty() ? std::vector<double>{} : parse_list(o.point, "--point");
  nlohmann::json rep;
  bool pass = true;

  if (o.check == "quasiconcave") {
    Expression f;
    ConvexSet set;
    if (!o.function.empty()) {
      f = parse(o.function);
      int d = 0;
      for (const auto& name : f.variables()) {
        auto ref = parse_variable(name);
        if (!ref || ref->player != VarRef::kOwn) {
          throw UsageError("--function for quasiconcave may use only z_j variables");
        }
        d = std::max(d, ref->coord + 1);
      }
      d = std::max(d, 1);
      double lo = -10, hi = 10;
      if (!o.box.empty()) {
        auto b = parse_list(o.box, "--box");
        if (b.size() != 2 || !(b[0] <= b[1])) throw UsageError("--box expects lo,hi");
        lo = b[0];
        hi = b[1];
      }
      set = Box{Vec::Constant(d, lo), Vec::Constant(d, hi)};
    } else {
      const GameInstance inst = load_instance(read_file(o.instance));
      const auto i = static_cast<std::size_t>(o.player - 1);
      if (o.player < 1 || i >= inst.players.size()) throw UsageError("--player out of range");
      Profile x = initial_point(inst, SolveConfig{}, 0);
      if (!point.empty()) {
        // --point lists the whole profile, players in order.
        std::size_t at = 0;
        for (auto& xi : x) {
          for (Eigen::Index j = 0; j < xi.size(); ++j) {
            if (at >= point.size()) throw UsageError("--point is shorter than the strategy profile");
            xi[j] = point[at++];
          }
        }
      }
      Env rivals;
      for (std::size_t k = 0; k < x.size(); ++k) {
        for (Eigen::Index j = 0; j < x[k].size(); ++j) {
          rivals["x" + std::to_string(k + 1) + "_" + std::to_string(j + 1)] = x[k][j];
        }
      }
      f = inst.players[i].objective.substitute(rivals);
      set = materialize(realize_constraint(inst, i, x));
    }
    const int samples = o.samples > 0 ? o.samples : 10000;
    const auto r = check_quasiconcave(f, set, samples, 1e-9, o.seed);
    pass = r.quasiconcave;
    rep = to_json(r);
  } else if (o.check == "lsc" || o.check == "fptlsc") {
    Expression f;
    std::optional<ConstraintMapSpec> k;
    int du = 0, dv = 0;
    if (!o.function.empty()) {
      if (o.check == "fptlsc") throw UsageError("diagnose: fptlsc needs --instance for the constraint map");
      f = parse(o.function);
      for (const auto& name : f.variables()) {
        if (name.size() < 3 || (name[0] != 'u' && name[0] != 'v') || name[1] != '_') {
          throw UsageError("--function for lsc may use only u_j and v_j variables");
        }
        const int idx = std::stoi(name.substr(2));
        (name[0] == 'u' ? du : dv) = std::max(name[0] == 'u' ? du : dv, idx);
      }
    } else {
      const GameInstance inst = load_instance(read_file(o.instance));
      const auto i = static_cast<std::size_t>(o.player - 1);
      if (o.player < 1 || i >= inst.players.size()) throw UsageError("--player out of range");
      UVProblem uv = as_uv_problem(inst, i);
      f = uv.f;
      k = uv.k;
      du = uv.u_dim;
      dv = uv.v_dim;
    }
    if (point.size() != static_cast<std::size_t>(du + dv)) {
      throw UsageError("--point must list " + std::to_string(du) + " u coordinate(s) then " +
                       std::to_string(dv) + " v coordinate(s)");
    }
    const Vec u = to_vec(std::vector<double>(point.begin(), point.begin() + du));
    const Vec v = to_vec(std::vector<double>(point.begin() + du, point.end()));
    const SemicontinuityReport r = o.check == "lsc" ? check_lsc_at(f, u, v, o.epsilon, sampling(o))
                                                    : check_fpt_lsc_at(f, *k, u, v, o.epsilon, sampling(o));
    pass = r.pass;
    rep = to_json(r);
    rep["check"] = o.check;
  } else {
    throw UsageError("--check must be one of quasiconcave, lsc, fptlsc");
  }
  rep["seed"] = o.seed;
  emit_report(o, rep, out, true);
  return pass ? kOk : kFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Best approximate solutions of generalized Nash games and quasi-optimization problems"};
  app.require_subcommand(1);
  Options o;

  auto* solve_cmd = app.add_subcommand("solve", "Run the projected best-response fixed-point iteration");
  solve_cmd->add_option("--instance", o.instance, "Instance file")->required();
  solve_cmd->add_option("--report", o.report, "Write the JSON report here");
  solve_cmd->add_option("--tol", o.tol, "Certificate tolerance");
  solve_cmd->add_option("--tol-fp", o.tol_fp, "Fixed-point step tolerance");
  solve_cmd->add_option("--max-iter", o.max_iter, "Iterations per start");
  solve_cmd->add_option("--starts", o.starts, "Number of start points");
  solve_cmd->add_option("--damping", o.damping, "Averaging factor in (0,1]");
  solve_cmd->add_option("--seed", o.seed, "Root random seed");
  solve_cmd->add_flag("--trace", o.trace, "Include the iterate trace in the report");

  auto* certify_cmd = app.add_subcommand("certify", "Check a candidate (x_tilde, y_tilde)");
  certify_cmd->add_option("--instance", o.instance, "Instance file")->required();
  certify_cmd->add_option("--candidate", o.candidate, "Candidate file")->required();
  certify_cmd->add_option("--tol", o.tol, "Residual tolerance");
  certify_cmd->add_option("--seed", o.seed, "Best-response sampler seed");
  certify_cmd->add_option("--report", o.report, "Write the JSON report here");

  auto* oracle_cmd = app.add_subcommand("oracle", "Enumerate grid fixed points by brute force");
  oracle_cmd->add_option("--instance", o.instance, "Instance file")->required();
  oracle_cmd->add_option("--grid", o.grid, "Points per axis");
  oracle_cmd->add_option("--match-tol", o.match_tol, "Residual acceptance (default 1.5 x spacing)");
  oracle_cmd->add_option("--budget", o.budget, "Maximum evaluations");
  oracle_cmd->add_option("--seed", o.seed, "Recorded in the report");
  oracle_cmd->add_option("--report", o.report, "Write the candidate list here");

  auto* example_cmd = app.add_subcommand("example", "Write a bundled instance");
  example_cmd->add_option("--name", o.name, "Instance name")->required();
  example_cmd->add_option("--emit", o.emit, "Output path (default: standard output)");

  auto* diagnose_cmd = app.add_subcommand("diagnose", "Sampling checks of quasi-concavity and semicontinuity");
  diagnose_cmd->add_option("--instance", o.instance, "Instance file");
  diagnose_cmd->add_option("--function", o.function, "Expression to check");
  diagnose_cmd->add_option("--check", o.check, "quasiconcave | lsc | fptlsc")->required();
  diagnose_cmd->add_option("--point", o.point, "Comma-separated point");
  diagnose_cmd->add_option("--epsilon", o.epsilon, "Tolerance epsilon of the semicontinuity checks");
  diagnose_cmd->add_option("--seed", o.seed, "Sampler seed");
  diagnose_cmd->add_option("--box", o.box, "lo,hi bounds per coordinate for --function (default -10,10)");
  diagnose_cmd->add_option("--player", o.player, "Player index for --instance (1-based)");
  diagnose_cmd->add_option("--samples", o.samples, "Number of random samples");
  diagnose_cmd->add_option("--report", o.report, "Write the JSON report here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  // Buffer standard output so that nothing reaches it when a command fails.
  std::ostringstream buffer;
  try {
    int code = kUsage;
    if (solve_cmd->parsed()) code = cmd_solve(o, buffer);
    else if (certify_cmd->parsed()) code = cmd_certify(o, buffer);
    else if (oracle_cmd->parsed()) code = cmd_oracle(o, buffer);
    else if (example_cmd->parsed()) code = cmd_example(o, buffer);
    else if (diagnose_cmd->parsed()) code = cmd_diagnose(o, buffer);
    out << buffer.str();
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace bestapprox::cli
