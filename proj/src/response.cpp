#include "bestapprox/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "bestapprox/rng.hpp"

namespace bestapprox {

namespace {

constexpr double kMinStep = 1e-12;
constexpr double kFeasibleTol = 1e-6;

struct Candidate {
  Vec point;
  double value;
  ResponsePhase phase;
};

bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

class Maximizer {
 public:
  Maximizer(const GameInstance& inst, std::size_t player, const Profile& x,
            const ResponseConfig& cfg)
      : inst_(inst),
        player_(player),
        x_(x),
        cfg_(cfg),
        objective_(inst.players.at(player).objective),
        set_(realize_constraint(inst, player, x)),
        unit_(SemiNorm::euclidean(dim(set_))) {}

  ResponseResult run() {
    const Box bb = bounding_box(set_);
    const double diameter = (bb.upper - bb.lower).norm();
    const double step0 = cfg_.step_init ? *cfg_.step_init : 0.1 * diameter;

    std::vector<Candidate> cands;
    Rng rng(mix_seed(cfg_.seed, player_));
    for (int s = 0; s < cfg_.starts; ++s) {
      Vec start(bb.lower.size());
      for (Eigen::Index j = 0; j < start.size(); ++j) start[j] = rng.uniform(bb.lower[j], bb.upper[j]);
      start = project(set_, unit_, start).point;
      const double v0 = value_at(start);
      cands.push_back({start, v0, ResponsePhase::Start});
      if (step0 > 0) {
        auto [z, fz] = ascend(start, v0, step0);
        cands.push_back({std::move(z), fz, ResponsePhase::Ascent});
      }
    }
    for (auto& g : sample_grid(set_, cfg_.polish_resolution)) {
      const double v = value_at(g);
      cands.push_back({std::move(g), v, ResponsePhase::Grid});
    }

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : cands) best = std::max(best, c.value);
    const Candidate* pick = nullptr;
    for (const auto& c : cands) {
      if (c.value < best - cfg_.tol_value) continue;
      if (pick == nullptr || lex_less(c.point, pick->point)) pick = &c;
    }
    return {pick->point, pick->value, pick->phase};
  }

 private:
  double value_at(const Vec& z) const {
    double v;
    try {
      v = objective_(x_, z);
    } catch (const EvalError& e) {
      throw SolverError("player " + inst_.players[player_].name +
                        ": objective evaluation failed at feasible point z = " + format_vec(z) +
                        ": " + e.what());
    }
    if (!std::isfinite(v)) {
      throw SolverError("player " + inst_.players[player_].name +
                        ": non-finite objective at feasible point z = " + format_vec(z));
    }
    return v;
  }

  // Central differences; nullopt when a perturbed point is outside the
  // objective's domain.
  std::optional<Vec> gradient(const Vec& z) const {
    Vec g(z.size());
    Vec probe = z;
    try {
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::fabs(z[j]));
        probe[j] = z[j] + h;
        const double up = objective_(x_, probe);
        probe[j] = z[j] - h;
        const double down = objective_(x_, probe);
        probe[j] = z[j];
        g[j] = (up - down) / (2 * h);
      }
    } catch (const EvalError&) {
      return std::nullopt;
    }
    if (!g.allFinite()) return std::nullopt;
    return g;
  }

  std::pair<Vec, double> ascend(Vec z, double fz, double step) const {
    for (int it = 0; it < cfg_.ascent_steps && step >= kMinStep; ++it) {
      auto g = gradient(z);
      if (!g) break;
      const double gn = g->norm();
      if (gn == 0.0) break;
      Vec trial = project(set_, unit_, z + (step / gn) * *g).point;
      const double ft = value_at(trial);
      if (ft > fz) {
        z = std::move(trial);
        fz = ft;
      } else {
        step *= cfg_.step_shrink;
      }
    }
    return {std::move(z), fz};
  }

  const GameInstance& inst_;
  std::size_t player_;
  const Profile& x_;
  const ResponseConfig& cfg_;
  BoundExpression objective_;
  RealizedSet set_;
  SemiNorm unit_;
};

}  // namespace

void check_config(const ResponseConfig& cfg) {
  if (cfg.starts < 1) throw Error("response: starts must be positive");
  if (cfg.ascent_steps < 1) throw Error("response: ascent_steps must be positive");
  if (cfg.step_init && !(*cfg.step_init > 0)) throw Error("response: step_init must be positive");
  if (!(cfg.step_shrink > 0 && cfg.step_shrink < 1)) throw Error("response: step_shrink must lie in (0,1)");
  if (cfg.polish_resolution < 2) throw Error("response: polish_resolution must be at least 2");
  if (!(cfg.tol_value > 0)) throw Error("response: tol_value must be positive");
}

const char* to_string(ResponsePhase phase) {
  switch (phase) {
    case ResponsePhase::Start: return "start";
    case ResponsePhase::Ascent: return "ascent";
    case ResponsePhase::Grid: return "grid";
  }
  return "?";
}

ResponseResult best_response(const GameInstance& inst, std::size_t player, const Profile& x,
                             const ResponseConfig& cfg) {
  check_config(cfg);
  return Maximizer(inst, player, x, cfg).run();
}

double response_value_gap(const GameInstance& inst, std::size_t player, const Profile& x,
                          const Vec& y, const ResponseConfig& cfg) {
  const RealizedSet feasible = realize_constraint(inst, player, x);
  const double viol = max_violation(feasible, y);
  if (viol > kFeasibleTol) {
    throw InfeasibleError("player " + inst.players.at(player).name + ": y = " + format_vec(y) +
                              " violates F_i(x_{-i}) by " + std::to_string(viol),
                          viol);
  }
  const double best = best_response(inst, player, x, cfg).value;
  const double gap = best - objective_value(inst, player, x, y);
  return gap <= cfg.tol_value ? 0.0 : gap;
}

}  // namespace bestapprox
