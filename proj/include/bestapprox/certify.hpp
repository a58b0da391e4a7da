#pragma once

#include <string>
#include <vector>

#include "bestapprox/model.hpp"
#include "bestapprox/response.hpp"

namespace bestapprox {

/// Residuals of the best-approximate-solution conditions for one player.
struct PlayerResiduals {
  std::string name;
  double feas_X = 0.0;         // violation of x~_i in X_i
  double proj_residual = 0.0;  // |p_i(y~_i - x~_i) - d_{p_i}(y~_i, X_i)|
  double feas_F = 0.0;         // violation of y~_i in F_i(x~_{-i})
  double opt_residual = 0.0;   // payoff gap of y~_i against a best response
  std::string error;           // set when F_i or u_i could not be evaluated

  double max() const;
};

struct CertReport {
  std::vector<PlayerResiduals> players;
  double aggregate = 0.0;
  double tol = 0.0;
  bool pass = false;
  /// Grid resolution of the best-response polish that bounds opt_residual.
  int oracle_resolution = 0;
};

/// Checks (x~, y~) against the solution conditions: for every player, x~_i in X_i,
/// x~_i is a p_i-best approximation of y~_i in X_i, y~_i in F_i(x~_{-i}), and
/// y~_i maximizes u_i(x~_{-i}, .) over F_i(x~_{-i}). For quopt instances the
/// same four conditions describe (u-bar, v-bar).
///
/// Throws DimensionError if the candidate does not match the instance;
/// realization and evaluation failures are recorded per player.
CertReport certify(const GameInstance& inst, const CandidateSolution& cand, double tol,
                   const ResponseConfig& cfg);

struct GneCheck {
  bool is_gne = false;
  double residual = 0.0;
};

/// True iff x is in X, every x_i lies in F_i(x_{-i}) within tol and no player
/// can improve by more than tol.
GneCheck is_classical_gne(const GameInstance& inst, const Profile& x, double tol,
                          const ResponseConfig& cfg);

/// Throws DimensionError unless x has one vector of the right size per player.
void check_profile(const GameInstance& inst, const Profile& x, const char* what);

}  // namespace bestapprox
