#pragma once

#include <cstdint>
#include <optional>

#include "bestapprox/model.hpp"

namespace bestapprox {

struct ResponseConfig {
  int starts = 16;
  int ascent_steps = 500;
  /// Initial ascent step; defaults to 0.1 x the realized set's bounding-box diagonal.
  std::optional<double> step_init;
  double step_shrink = 0.5;
  int polish_resolution = 33;
  double tol_value = 1e-9;
  std::uint64_t seed = 42;
};

/// Throws Error if a field is out of range.
void check_config(const ResponseConfig& cfg);

/// Which phase produced the selected maximizer.
enum class ResponsePhase { Start, Ascent, Grid };
const char* to_string(ResponsePhase phase);

struct ResponseResult {
  Vec y_star;
  double value = 0.0;
  ResponsePhase status = ResponsePhase::Grid;
};

/// A point of the maximizing map M_i(x_{-i}): maximizes u_i(x_{-i}, .) over
/// F_i(x_{-i}).
///
/// Seeded multi-start projected gradient ascent (finite-difference
/// gradients, backtracking by step_shrink) followed by a grid polish over
/// sample_grid(F_i(x_{-i}), polish_resolution). Among all candidates within
/// tol_value of the best value the lexicographically smallest is returned.
ResponseResult best_response(const GameInstance& inst, std::size_t player, const Profile& x,
                             const ResponseConfig& cfg);

/// best_response value minus u_i(x_{-i}, y), floored to 0 when within
/// tol_value. Throws InfeasibleError if y is not in F_i(x_{-i}) within 1e-6.
double response_value_gap(const GameInstance& inst, std::size_t player, const Profile& x,
                          const Vec& y, const ResponseConfig& cfg);

}  // namespace bestapprox
