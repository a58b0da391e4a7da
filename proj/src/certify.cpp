#include "bestapprox/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bestapprox {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double PlayerResiduals::max() const {
  if (!error.empty()) return kInf;
  return std::max({feas_X, proj_residual, feas_F, opt_residual});
}

void check_profile(const GameInstance& inst, const Profile& x, const char* what) {
  if (x.size() != inst.players.size()) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(inst.players.size()) +
                         " player vectors, got " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != inst.players[i].dim) {
      throw DimensionError(std::string(what) + ": player " + inst.players[i].name + " expects dim " +
                           std::to_string(inst.players[i].dim) + ", got " +
                           std::to_string(x[i].size()));
    }
  }
}

CertReport certify(const GameInstance& inst, const CandidateSolution& cand, double tol,
                   const ResponseConfig& cfg) {
  check_profile(inst, cand.x_tilde, "x_tilde");
  check_profile(inst, cand.y_tilde, "y_tilde");
  CertReport rep;
  rep.tol = tol;
  rep.oracle_resolution = cfg.polish_resolution;
  for (std::size_t i = 0; i < inst.players.size(); ++i) {
    const auto& p = inst.players[i];
    const Vec& xi = cand.x_tilde[i];
    const Vec& yi = cand.y_tilde[i];
    PlayerResiduals r;
    r.name = p.name;
    try {
      r.feas_X = max_violation(p.strategy_set, xi);
      const double gap_to_x = seminorm_eval(p.seminorm, yi - xi);
      r.proj_residual = std::fabs(gap_to_x - distance(p.strategy_set, p.seminorm, yi));
      const RealizedSet feasible = realize_constraint(inst, i, cand.x_tilde);
      r.feas_F = max_violation(feasible, yi);
      const double best = best_response(inst, i, cand.x_tilde, cfg).value;
      const double gap = best - objective_value(inst, i, cand.x_tilde, yi);
      r.opt_residual = gap <= cfg.tol_value ? 0.0 : gap;
    } catch (const DimensionError&) {
      throw;
    } catch (const Error& e) {
      r.error = e.what();
    }
    rep.aggregate = std::max(rep.aggregate, r.max());
    rep.players.push_back(std::move(r));
  }
  rep.pass = rep.aggregate <= tol;
  return rep;
}

GneCheck is_classical_gne(const GameInstance& inst, const Profile& x, double tol,
                          const ResponseConfig& cfg) {
  check_profile(inst, x, "x");
  GneCheck out;
  // Membership first: best responses are only worth computing at feasible profiles.
  for (std::size_t i = 0; i < inst.players.size(); ++i) {
    try {
      const double viol = std::max(max_violation(inst.players[i].strategy_set, x[i]),
                                   max_violation(realize_constraint(inst, i, x), x[i]));
      out.residual = std::max(out.residual, viol);
    } catch (const RealizationError&) {
      return {false, kInf};
    }
  }
  if (out.residual > tol) return out;
  for (std::size_t i = 0; i < inst.players.size(); ++i) {
    try {
      const double gap = best_response(inst, i, x, cfg).value - objective_value(inst, i, x, x[i]);
      if (gap > cfg.tol_value) out.residual = std::max(out.residual, gap);
    } catch (const Error&) {
      return {false, kInf};
    }
  }
  out.is_gne = out.residual <= tol;
  return out;
}

}  // namespace bestapprox
