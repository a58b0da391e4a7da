#include "bestapprox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "bestapprox/error.hpp"
#include "bestapprox/rng.hpp"

namespace bestapprox {

namespace {

constexpr double kMembershipTol = 1e-6;

// Evaluates an expression over named vector blocks: prefix_1, prefix_2, ...
class BlockEvaluator {
 public:
  BlockEvaluator(const Expression& e, std::vector<char> prefixes) : expr_(e) {
    for (const auto& name : e.variables()) {
      const auto us = name.find('_');
      char block = 0;
      int idx = -1;
      if (us == 1 && std::find(prefixes.begin(), prefixes.end(), name[0]) != prefixes.end()) {
        block = name[0];
        try {
          std::size_t used = 0;
          idx = std::stoi(name.substr(2), &used) - 1;
          if (used != name.size() - 2) idx = -1;
        } catch (const std::exception&) {
          idx = -1;
        }
      }
      if (idx < 0) throw EvalError("unexpected variable '" + name + "' in diagnostic function");
      refs_.push_back({block, idx});
    }
    values_.resize(refs_.size());
  }

  void require_dims(int du, int dv) const {
    for (std::size_t k = 0; k < refs_.size(); ++k) {
      const int lim = refs_[k].first == 'v' ? dv : du;
      if (refs_[k].second >= lim) {
        throw DimensionError("variable '" + expr_.variables()[k] + "' exceeds the point dimension");
      }
    }
  }

  double operator()(const Vec& a, const Vec& b = Vec()) {
    for (std::size_t k = 0; k < refs_.size(); ++k) {
      const Vec& src = refs_[k].first == 'v' ? b : a;
      values_[k] = src[refs_[k].second];
    }
    return expr_.evaluate(values_);
  }

 private:
  const Expression& expr_;
  std::vector<std::pair<char, int>> refs_;
  std::vector<double> values_;
};

Env u_env(const Vec& u) {
  Env env;
  for (Eigen::Index j = 0; j < u.size(); ++j) env["u_" + std::to_string(j + 1)] = u[j];
  return env;
}

Vec sample_in(const ConvexSet& s, Rng& rng) {
  const Box bb = bounding_box(s);
  Vec p(bb.lower.size());
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = rng.uniform(bb.lower[j], bb.upper[j]);
    if (contains(s, p, 1e-12)) return p;
  }
  return project(s, SemiNorm::euclidean(p.size()), p).point;
}

Vec perturb(const Vec& center, double r, Rng& rng) {
  Vec p = center;
  for (Eigen::Index j = 0; j < p.size(); ++j) p[j] += rng.uniform(-r, r);
  return p;
}

// K(u') clipped to the truncation box, as a sampleable set.
RealizedSet truncated(const RealizedSet& k, double half_width) {
  Box bb = bounding_box(k);
  const Vec lim = Vec::Constant(bb.lower.size(), half_width);
  Box clip{bb.lower.cwiseMax(-lim), bb.upper.cwiseMin(lim)};
  if ((clip.lower.array() > clip.upper.array()).any()) return k;
  if (std::holds_alternative<Box>(k.base)) return {Vec::Zero(clip.lower.size()), clip};
  if (auto* poly = std::get_if<Polytope>(&k.base)) {
    Polytope p = *poly;
    p.box = {clip.lower - k.shift, clip.upper - k.shift};
    return {k.shift, p};
  }
  return k;  // balls are bounded already
}

}  // namespace

QuasiconcavityReport check_quasiconcave(const Expression& f, const ConvexSet& s, int samples,
                                        double tol, std::uint64_t seed) {
  if (samples < 1) throw Error("check_quasiconcave: samples must be positive");
  BlockEvaluator eval(f, {'z'});
  eval.require_dims(static_cast<int>(dim(s)), 0);
  QuasiconcavityReport rep;
  rep.samples = samples;

  auto probe = [&](const Vec& u, const Vec& v, double t) {
    const double fu = eval(u);
    const double fv = eval(v);
    const double fm = eval(t * u + (1 - t) * v);
    if (rep.quasiconcave && fm < std::min(fu, fv) - tol) {
      rep.quasiconcave = false;
      rep.counterexample = MixWitness{u, v, t, fm, std::min(fu, fv)};
    }
    const double fmid = t == 0.5 ? fm : eval(0.5 * (u + v));
    if (rep.midpoint_concave && fmid < 0.5 * (fu + fv) - tol) {
      rep.midpoint_concave = false;
      rep.concavity_counterexample = MixWitness{u, v, 0.5, fmid, 0.5 * (fu + fv)};
    }
  };

  const auto coarse = sample_grid(s, 3);
  for (std::size_t a = 0; a < coarse.size(); ++a) {
    for (std::size_t b = a + 1; b < coarse.size(); ++b) probe(coarse[a], coarse[b], 0.5);
  }
  Rng rng(seed);
  for (int k = 0; k < samples; ++k) {
    Vec u = sample_in(s, rng);
    Vec v = sample_in(s, rng);
    probe(u, v, rng.uniform());
  }
  return rep;
}

SemicontinuityReport check_lsc_at(const Expression& f, const Vec& u, const Vec& v, double epsilon,
                                  const SamplingOptions& opts) {
  BlockEvaluator eval(f, {'u', 'v'});
  eval.require_dims(static_cast<int>(u.size()), static_cast<int>(v.size()));
  SemicontinuityReport rep;
  rep.value_at_point = eval(u, v);
  Rng rng(opts.seed);
  bool every_radius = !opts.radii.empty();
  for (double r : opts.radii) {
    RadiusOutcome ro;
    ro.radius = r;
    for (int k = 0; k < opts.samples && !ro.violated; ++k) {
      Vec up = perturb(u, r, rng);
      Vec vp = perturb(v, r, rng);
      const double val = eval(up, vp);
      if (val <= rep.value_at_point - epsilon) {
        ro.violated = true;
        ro.witness_u = std::move(up);
        ro.witness_v = std::move(vp);
        ro.witness_value = val;
      }
    }
    every_radius = every_radius && ro.violated;
    rep.radii.push_back(std::move(ro));
  }
  rep.pass = !every_radius;
  return rep;
}

SemicontinuityReport check_fpt_lsc_at(const Expression& f, const ConstraintMapSpec& k,
                                      const Vec& u, const Vec& v, double epsilon,
                                      const SamplingOptions& opts) {
  BlockEvaluator eval(f, {'u', 'v'});
  eval.require_dims(static_cast<int>(u.size()), static_cast<int>(v.size()));
  if (map_dim(k) != v.size()) throw DimensionError("constraint map dimension does not match v");
  const RealizedSet at_point = realize_map(k, u_env(u));
  const double viol = max_violation(at_point, v);
  if (viol > kMembershipTol) {
    throw InfeasibleError("check_fpt_lsc_at: v = " + format_vec(v) + " is not in K(u)", viol);
  }
  SemicontinuityReport rep;
  rep.value_at_point = eval(u, v);
  const double target = rep.value_at_point - epsilon;  // need f(u', v') > target
  const SemiNorm unit = SemiNorm::euclidean(v.size());
  Rng rng(opts.seed);

  for (double r : opts.radii) {
    RadiusOutcome ro;
    ro.radius = r;
    for (int s = 0; s < opts.samples && !ro.violated; ++s) {
      const Vec up = s == 0 ? u : perturb(u, r, rng);
      // A u' where K cannot be realized (empty, or its bounds fail to
      // evaluate) lies outside the map's domain and is not a test point.
      std::optional<RealizedSet> maybe;
      try {
        maybe = realize_map(k, u_env(up));
      } catch (const RealizationError&) {
        continue;
      }
      const RealizedSet& ku = *maybe;
      // Candidate v': the point of K(u') nearest v, a grid of K(u'), random draws.
      bool found = eval(up, project(ku, unit, v).point) > target;
      if (!found) {
        const RealizedSet kt = truncated(ku, opts.truncation);
        for (const auto& g : sample_grid(kt, opts.candidate_resolution)) {
          if (eval(up, g) > target) {
            found = true;
            break;
          }
        }
        for (int d = 0; d < 16 && !found; ++d) {
          const Vec w = kt.shift + sample_in(kt.base, rng);
          found = eval(up, w) > target;
        }
      }
      if (!found) {
        ro.violated = true;
        ro.witness_u = up;
      }
    }
    rep.radii.push_back(std::move(ro));
  }
  rep.pass = rep.radii.empty() || !rep.radii.back().violated;
  return rep;
}

UVProblem as_uv_problem(const GameInstance& inst, std::size_t player) {
  const auto& p = inst.players.at(player);
  // Flattened u index of every x{k}_{j} the map may read.
  std::map<std::string, std::string> rename;
  int next = 0;
  for (std::size_t k = 0; k < inst.players.size(); ++k) {
    const bool reads = inst.kind == ProblemKind::Quopt ? k == player : k != player;
    if (!reads) continue;
    for (int j = 0; j < inst.players[k].dim; ++j) {
      rename["x" + std::to_string(k + 1) + "_" + std::to_string(j + 1)] =
          "u_" + std::to_string(++next);
    }
  }
  auto to_uv = [&](const std::string& name) -> std::string {
    if (auto it = rename.find(name); it != rename.end()) return it->second;
    if (name.rfind("z_", 0) == 0) return "v_" + name.substr(2);
    return name;
  };
  UVProblem out;
  out.f = p.objective.rename(to_uv);
  out.u_dim = next;
  out.v_dim = p.dim;
  auto conv = [&](const std::vector<Expression>& es) {
    std::vector<Expression> r;
    for (const auto& e : es) r.push_back(e.rename(to_uv));
    return r;
  };
  if (auto* t = std::get_if<TranslateMap>(&p.constraint_map)) {
    out.k = TranslateMap{conv(t->shift), t->base};
  } else {
    const auto& b = std::get<ParamBoxMap>(p.constraint_map);
    out.k = ParamBoxMap{conv(b.lower), conv(b.upper)};
  }
  return out;
}

}  // namespace bestapprox
