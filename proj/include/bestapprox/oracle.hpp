#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bestapprox/model.hpp"

namespace bestapprox {

struct OracleCandidate {
  Profile x;
  Profile y_hat;
  double residual = 0.0;
};

struct OracleResult {
  std::vector<OracleCandidate> candidates;  // ascending residual, grid order on ties
  double spacing = 0.0;
  double match_tol = 0.0;
  int resolution = 0;
  std::size_t evaluations = 0;  // objective evaluations plus profiles visited
  std::size_t skipped = 0;      // profiles dropped because F_i failed to realize
};

struct OracleConfig {
  int resolution = 21;
  /// Defaults to 1.5 x grid_spacing.
  std::optional<double> match_tol;
  std::size_t budget = 10'000'000;
};

/// Largest per-coordinate step of the strategy-set grids.
double grid_spacing(const GameInstance& inst, int resolution);

/// Fixed points of the discretized Pr o M. For every profile x on the product
/// of the X_i grids: y^_i maximizes u_i over the grid of F_i(x_{-i})
/// (lexicographic tie-break), x'_i = Pr_i(y^_i), and x is kept when
/// max_i p_i(x'_i - x_i) <= match_tol. Throws BudgetError when the estimated
/// number of evaluations exceeds the budget.
OracleResult brute_force_gnep(const GameInstance& inst, const OracleConfig& cfg);
OracleResult brute_force_quopt(const GameInstance& inst, const OracleConfig& cfg);
OracleResult brute_force(const GameInstance& inst, const OracleConfig& cfg);

/// Single-linkage clusters of candidates under the max-coordinate distance.
std::vector<std::vector<std::size_t>> cluster_candidates(
    const std::vector<OracleCandidate>& candidates, double radius);

/// Max-coordinate distance between two profiles of equal shape.
double profile_distance(const Profile& a, const Profile& b);

}  // namespace bestapprox
