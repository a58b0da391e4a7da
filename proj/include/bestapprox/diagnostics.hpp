#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bestapprox/model.hpp"

namespace bestapprox {

// Sampling checks of the hypotheses behind the existence results. They
// produce evidence, never proofs; every report carries evidence_only = true.

/// A pair (u, v), a mixing weight t, the value at the mixed point and the
/// bound it fell short of.
struct MixWitness {
  Vec u;
  Vec v;
  double t = 0.5;
  double value = 0.0;
  double bound = 0.0;
};

struct QuasiconcavityReport {
  bool quasiconcave = true;
  std::optional<MixWitness> counterexample;
  bool midpoint_concave = true;
  std::optional<MixWitness> concavity_counterexample;
  int samples = 0;
  bool evidence_only = true;
};

/// f over z_1..z_d on S. Pairs from the resolution-3 grid of S are probed
/// first (t = 1/2), then `samples` seeded triples (u, v, t).
QuasiconcavityReport check_quasiconcave(const Expression& f, const ConvexSet& s, int samples,
                                        double tol, std::uint64_t seed);

struct SamplingOptions {
  std::vector<double> radii{1.0, 0.1, 0.01, 1e-3, 1e-4};
  int samples = 2000;
  std::uint64_t seed = 42;
  /// Half-width of the box that truncates unbounded realized sets.
  double truncation = 10.0;
  /// Grid resolution used to search K(u') in the FPT check.
  int candidate_resolution = 21;
};

struct RadiusOutcome {
  double radius = 0.0;
  bool violated = false;
  std::optional<Vec> witness_u;  // u' (and, for the lsc check, v') of a violation
  std::optional<Vec> witness_v;
  double witness_value = 0.0;
};

struct SemicontinuityReport {
  bool pass = true;
  double value_at_point = 0.0;
  std::vector<RadiusOutcome> radii;
  bool evidence_only = true;
};

/// f over variables u_j, v_j. Reports a violation when at every radius some
/// sampled (u', v') has f(u', v') <= f(u, v) - epsilon.
SemicontinuityReport check_lsc_at(const Expression& f, const Vec& u, const Vec& v, double epsilon,
                                  const SamplingOptions& opts);

/// f over u_j, v_j and a constraint map K whose expressions read u_j. For
/// sampled u' near u, searches v' in K(u') with f(u, v) < f(u', v') + epsilon.
/// Fails when some u' at the finest radius admits no such v'.
/// Samples u' where K cannot be realized are outside its domain and skipped.
/// Throws InfeasibleError unless v is in K(u) within 1e-6.
SemicontinuityReport check_fpt_lsc_at(const Expression& f, const ConstraintMapSpec& k,
                                      const Vec& u, const Vec& v, double epsilon,
                                      const SamplingOptions& opts);

/// Player i's objective and constraint map rewritten over u (the variables
/// the map reads: rivals for gnep, the player's own public strategy for
/// quopt, flattened in player order) and v (the player's own z).
struct UVProblem {
  Expression f;
  ConstraintMapSpec k;
  int u_dim = 0;
  int v_dim = 0;
};

UVProblem as_uv_problem(const GameInstance& inst, std::size_t player);

}  // namespace bestapprox
