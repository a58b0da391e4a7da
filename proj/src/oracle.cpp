#include "bestapprox/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bestapprox {

namespace {

constexpr double kTieTol = 1e-9;

struct ResponseEntry {
  bool ok = false;
  Vec y_hat;
  Vec target;  // Pr_i(y_hat)
};

// Mixed-radix index over the grids of `players`.
std::size_t sub_index(const std::vector<std::size_t>& digits, const std::vector<std::size_t>& players,
                      const std::vector<std::vector<Vec>>& grids) {
  std::size_t idx = 0;
  for (std::size_t k : players) idx = idx * grids[k].size() + digits[k];
  return idx;
}

bool advance(std::vector<std::size_t>& digits, const std::vector<std::size_t>& players,
             const std::vector<std::vector<Vec>>& grids) {
  for (auto it = players.rbegin(); it != players.rend(); ++it) {
    if (++digits[*it] < grids[*it].size()) return true;
    digits[*it] = 0;
  }
  return false;
}

}  // namespace

double grid_spacing(const GameInstance& inst, int resolution) {
  double h = 0.0;
  for (const auto& p : inst.players) {
    const Box bb = bounding_box(p.strategy_set);
    h = std::max(h, (bb.upper - bb.lower).maxCoeff() / (resolution - 1));
  }
  return h;
}

OracleResult brute_force(const GameInstance& inst, const OracleConfig& cfg) {
  if (cfg.resolution < 2) throw Error("oracle: resolution must be at least 2");
  const std::size_t n = inst.players.size();
  OracleResult res;
  res.resolution = cfg.resolution;
  res.spacing = grid_spacing(inst, cfg.resolution);
  res.match_tol = cfg.match_tol ? *cfg.match_tol : 1.5 * res.spacing;

  std::vector<std::vector<Vec>> grids;
  for (const auto& p : inst.players) grids.push_back(sample_grid(p.strategy_set, cfg.resolution));

  // F_i reads the rivals (gnep) or the player's own public strategy (quopt).
  std::vector<std::vector<std::size_t>> reads(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (inst.kind == ProblemKind::Quopt ? k == i : k != i) reads[i].push_back(k);
    }
  }

  double estimate = 1.0;
  for (const auto& g : grids) estimate *= static_cast<double>(g.size());
  for (std::size_t i = 0; i < n; ++i) {
    double combos = 1.0;
    for (std::size_t k : reads[i]) combos *= static_cast<double>(grids[k].size());
    estimate += combos * std::pow(static_cast<double>(cfg.resolution), inst.players[i].dim);
  }
  if (estimate > static_cast<double>(cfg.budget)) {
    throw BudgetError("oracle: estimated " + std::to_string(static_cast<long long>(estimate)) +
                      " evaluations exceed the budget of " + std::to_string(cfg.budget));
  }
  for (const auto& g : grids) {
    if (g.empty()) return res;
  }

  // Best grid response and its projection for every distinct input of F_i.
  std::vector<std::vector<ResponseEntry>> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = inst.players[i];
    const BoundExpression u(p.objective);
    std::vector<std::size_t> digits(n, 0);
    Profile x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = grids[k][0];
    do {
      for (std::size_t k : reads[i]) x[k] = grids[k][digits[k]];
      ResponseEntry entry;
      try {
        const auto fgrid = sample_grid(realize_constraint(inst, i, x), cfg.resolution);
        std::vector<double> values;
        values.reserve(fgrid.size());
        for (const auto& g : fgrid) values.push_back(u(x, g));
        res.evaluations += values.size();
        if (!fgrid.empty()) {
          const double best = *std::max_element(values.begin(), values.end());
          std::size_t pick = 0;
          while (values[pick] < best - kTieTol) ++pick;
          entry.ok = true;
          entry.y_hat = fgrid[pick];
          entry.target = project(p.strategy_set, p.seminorm, entry.y_hat).point;
        }
      } catch (const Error&) {
        entry.ok = false;
      }
      table[i].push_back(std::move(entry));
    } while (advance(digits, reads[i], grids));
  }

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> digits(n, 0);
  do {
    ++res.evaluations;
    double residual = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto& e = table[i][sub_index(digits, reads[i], grids)];
      if (!e.ok) {
        ok = false;
        break;
      }
      residual = std::max(residual, seminorm_eval(inst.players[i].seminorm,
                                                  e.target - grids[i][digits[i]]));
    }
    if (!ok) {
      ++res.skipped;
      continue;
    }
    if (residual <= res.match_tol) {
      OracleCandidate c;
      c.residual = residual;
      for (std::size_t i = 0; i < n; ++i) {
        c.x.push_back(grids[i][digits[i]]);
        c.y_hat.push_back(table[i][sub_index(digits, reads[i], grids)].y_hat);
      }
      res.candidates.push_back(std::move(c));
    }
  } while (advance(digits, all, grids));

  std::stable_sort(res.candidates.begin(), res.candidates.end(),
                   [](const OracleCandidate& a, const OracleCandidate& b) {
                     return a.residual < b.residual;
                   });
  return res;
}

OracleResult brute_force_gnep(const GameInstance& inst, const OracleConfig& cfg) {
  if (inst.kind != ProblemKind::Gnep) throw Error("brute_force_gnep: instance kind is not gnep");
  return brute_force(inst, cfg);
}

OracleResult brute_force_quopt(const GameInstance& inst, const OracleConfig& cfg) {
  if (inst.kind != ProblemKind::Quopt) throw Error("brute_force_quopt: instance kind is not quopt");
  return brute_force(inst, cfg);
}

double profile_distance(const Profile& a, const Profile& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).lpNorm<Eigen::Infinity>());
  return d;
}

std::vector<std::vector<std::size_t>> cluster_candidates(
    const std::vector<OracleCandidate>& candidates, double radius) {
  const std::size_t n = candidates.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (profile_distance(candidates[a].x, candidates[b].x) <= radius) {
        parent[find(b)] = find(a);
      }
    }
  }
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<long> slot(n, -1);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t r = find(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[r])].push_back(a);
  }
  return clusters;
}

}  // namespace bestapprox
