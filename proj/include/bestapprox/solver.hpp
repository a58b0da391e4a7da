#pragma once

#include <cstdint>
#include <vector>

#include "bestapprox/certify.hpp"
#include "bestapprox/model.hpp"
#include "bestapprox/response.hpp"

namespace bestapprox {

struct SolveConfig {
  double tol_fp = 1e-8;    // max_i p_i(x_i^{k+1} - x_i^k) that ends a start
  double tol_cert = 1e-6;  // certificate bound for declaring convergence
  int max_iter = 500;
  double damping = 1.0;  // averaging factor in (0, 1]
  int multistart = 8;
  /// Root seed. Start points and the best-response sampler derive from it;
  /// response.seed is overwritten.
  std::uint64_t seed = 42;
  ResponseConfig response;
  bool record_trace = false;
};

void check_config(const SolveConfig& cfg);

struct TraceEntry {
  Profile x;
  double step = 0.0;
};

/// Result of iterating from a single start point.
struct StartOutcome {
  bool converged = false;
  bool fixed_point_reached = false;  // step <= tol_fp before max_iter
  CandidateSolution solution;
  CertReport residuals;
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

struct SolveReport {
  bool converged = false;
  CandidateSolution solution;
  CertReport residuals;
  int iterations = 0;
  int starts_used = 0;
  std::uint64_t seed = 0;
  std::vector<TraceEntry> trace;
};

/// Start 0 projects each bounding-box midpoint into X_i; later starts
/// project seeded uniform samples of the bounding box.
Profile initial_point(const GameInstance& inst, const SolveConfig& cfg, int start_index);

/// Iterates x_i <- (1 - damping) x_i + damping * Pr_i(y_i) with y_i a best
/// response to x, until the p_i step drops below tol_fp or max_iter runs out,
/// then certifies (x, y). Realization or evaluation failures at an iterate
/// raise SolverError.
StartOutcome run_from(const GameInstance& inst, const SolveConfig& cfg, Profile x0,
                      int start_index = 0);

/// Multistart driver: the first certified start wins; otherwise the start
/// with the smallest aggregate residual is reported with converged = false.
SolveReport solve_gnep(const GameInstance& inst, const SolveConfig& cfg);
SolveReport solve_quopt(const GameInstance& inst, const SolveConfig& cfg);

/// Dispatches on inst.kind.
SolveReport solve(const GameInstance& inst, const SolveConfig& cfg);

/// The response configuration the solver actually uses for cfg.
ResponseConfig solver_response_config(const SolveConfig& cfg);

}  // namespace bestapprox
