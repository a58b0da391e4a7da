#include "bestapprox/solver.hpp"

#include <algorithm>

#include "bestapprox/rng.hpp"

namespace bestapprox {

namespace {

constexpr std::uint64_t kResponseStream = 0x5eed;
constexpr std::uint64_t kStartStream = 0x57a7;

std::string where(int start, int iteration) {
  return "start " + std::to_string(start) + ", iteration " + std::to_string(iteration);
}

SolveReport drive(const GameInstance& inst, const SolveConfig& cfg) {
  check_config(cfg);
  SolveReport report;
  report.seed = cfg.seed;
  bool have_best = false;
  for (int s = 0; s < cfg.multistart; ++s) {
    StartOutcome out = run_from(inst, cfg, initial_point(inst, cfg, s), s);
    report.starts_used = s + 1;
    const bool better = !have_best || out.residuals.aggregate < report.residuals.aggregate;
    if (out.converged || better) {
      report.converged = out.converged;
      report.solution = std::move(out.solution);
      report.residuals = std::move(out.residuals);
      report.iterations = out.iterations;
      report.trace = std::move(out.trace);
      have_best = true;
    }
    if (report.converged) break;
  }
  return report;
}

}  // namespace

void check_config(const SolveConfig& cfg) {
  if (!(cfg.tol_fp > 0)) throw Error("solver: tol_fp must be positive");
  if (!(cfg.tol_cert > 0)) throw Error("solver: tol_cert must be positive");
  if (cfg.max_iter < 1) throw Error("solver: max_iter must be positive");
  if (!(cfg.damping > 0 && cfg.damping <= 1)) throw Error("solver: damping must lie in (0,1]");
  if (cfg.multistart < 1) throw Error("solver: multistart must be positive");
  check_config(cfg.response);
}

ResponseConfig solver_response_config(const SolveConfig& cfg) {
  ResponseConfig r = cfg.response;
  r.seed = mix_seed(cfg.seed, kResponseStream);
  return r;
}

Profile initial_point(const GameInstance& inst, const SolveConfig& cfg, int start_index) {
  Profile x;
  Rng rng(mix_seed(cfg.seed, kStartStream + static_cast<std::uint64_t>(start_index)));
  for (const auto& p : inst.players) {
    const Box bb = bounding_box(p.strategy_set);
    Vec v;
    if (start_index == 0) {
      v = 0.5 * (bb.lower + bb.upper);
    } else {
      v.resize(bb.lower.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = rng.uniform(bb.lower[j], bb.upper[j]);
    }
    x.push_back(project(p.strategy_set, p.seminorm, v).point);
  }
  return x;
}

StartOutcome run_from(const GameInstance& inst, const SolveConfig& cfg, Profile x0,
                      int start_index) {
  check_profile(inst, x0, "start point");
  const ResponseConfig resp = solver_response_config(cfg);
  const std::size_t n = inst.players.size();
  StartOutcome out;
  Profile x = std::move(x0);
  Profile y(n);
  for (int k = 0; k < cfg.max_iter; ++k) {
    Profile next(n);
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = inst.players[i];
      try {
        y[i] = best_response(inst, i, x, resp).y_star;
      } catch (const Error& e) {
        throw SolverError(where(start_index, k) + ": " + e.what());
      }
      const Vec target = project(p.strategy_set, p.seminorm, y[i]).point;
      next[i] = (1.0 - cfg.damping) * x[i] + cfg.damping * target;
      step = std::max(step, seminorm_eval(p.seminorm, next[i] - x[i]));
    }
    x = std::move(next);
    out.iterations = k + 1;
    if (cfg.record_trace) out.trace.push_back({x, step});
    if (step <= cfg.tol_fp) {
      out.fixed_point_reached = true;
      break;
    }
  }
  out.solution = {x, y};
  out.residuals = certify(inst, out.solution, cfg.tol_cert, resp);
  out.converged = out.fixed_point_reached && out.residuals.pass;
  return out;
}

SolveReport solve_gnep(const GameInstance& inst, const SolveConfig& cfg) {
  if (inst.kind != ProblemKind::Gnep) throw Error("solve_gnep: instance kind is not gnep");
  return drive(inst, cfg);
}

SolveReport solve_quopt(const GameInstance& inst, const SolveConfig& cfg) {
  if (inst.kind != ProblemKind::Quopt) throw Error("solve_quopt: instance kind is not quopt");
  return drive(inst, cfg);
}

SolveReport solve(const GameInstance& inst, const SolveConfig& cfg) {
  return inst.kind == ProblemKind::Gnep ? solve_gnep(inst, cfg) : solve_quopt(inst, cfg);
}

}  // namespace bestapprox
