#include "bestapprox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/QR>

#include "bestapprox/error.hpp"

namespace bestapprox {

namespace {

constexpr double kDykstraTol = 1e-12;
constexpr int kDykstraSweeps = 10000;
constexpr double kGridTol = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

double box_violation(const Box& b, const Vec& v) {
  double viol = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    viol = std::max({viol, b.lower[j] - v[j], v[j] - b.upper[j]});
  }
  return viol;
}

Vec clamp(const Box& b, const Vec& v) { return v.cwiseMax(b.lower).cwiseMin(b.upper); }

void require_positive(const SemiNorm& p, const char* set_kind) {
  if (!p.is_norm()) {
    throw UnsupportedError(std::string("projection onto a ") + set_kind +
                           " requires strictly positive semi-norm weights");
  }
}

// argmin sum_j w_j (z_j - v_j)^2 subject to |z - c| <= r (Euclidean ball).
// Stationarity gives z_j - c_j = w_j d_j / (w_j + lambda), with lambda >= 0 the
// root of |z(lambda) - c| = r.
Vec project_ball(const Ball& ball, const Vec& w, const Vec& v) {
  const Vec d = v - ball.center;
  const double norm_d = d.norm();
  if (norm_d <= ball.radius) return v;
  if (w.maxCoeff() == w.minCoeff()) {
    return ball.center + (ball.radius / norm_d) * d;
  }
  auto radius_at = [&](double lambda) {
    return (w.array() * d.array() / (w.array() + lambda)).matrix().norm();
  };
  double lo = 0.0;
  double hi = w.maxCoeff() * norm_d / ball.radius;
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (radius_at(mid) > ball.radius ? lo : hi) = mid;
  }
  Vec z = (w.array() * d.array() / (w.array() + hi)).matrix();
  const double nz = z.norm();
  if (nz > 0) z *= ball.radius / nz;
  return ball.center + z;
}

struct PreparedHalfspace {
  const Halfspace* h;
  Vec direction;  // W^{-1} a
  double scale;   // a^T W^{-1} a
};

// Linear constraints row . z <= rhs of a polytope: box faces, then halfspaces.
struct Constraints {
  Eigen::MatrixXd rows;
  Vec rhs;
};

Constraints polytope_constraints(const Polytope& poly) {
  const Eigen::Index d = poly.box.lower.size();
  const auto m = 2 * d + static_cast<Eigen::Index>(poly.halfspaces.size());
  Constraints c{Eigen::MatrixXd::Zero(m, d), Vec(m)};
  for (Eigen::Index j = 0; j < d; ++j) {
    c.rows(2 * j, j) = -1.0;
    c.rhs[2 * j] = -poly.box.lower[j];
    c.rows(2 * j + 1, j) = 1.0;
    c.rhs[2 * j + 1] = poly.box.upper[j];
  }
  for (std::size_t k = 0; k < poly.halfspaces.size(); ++k) {
    const auto r = 2 * d + static_cast<Eigen::Index>(k);
    c.rows.row(r) = poly.halfspaces[k].normal.transpose();
    c.rhs[r] = poly.halfspaces[k].offset;
  }
  return c;
}

// Minimizer of the weighted distance to v with the constraints in `active`
// held as equalities, returned only if it satisfies every constraint and has
// nonnegative multipliers. Such a point is the projection (KKT conditions of
// a convex problem).
std::optional<Vec> kkt_point(const Constraints& c, const std::vector<Eigen::Index>& active, const Vec& w,
                             const Vec& v) {
  const auto k = static_cast<Eigen::Index>(active.size());
  if (k == 0) {
    if ((c.rows * v - c.rhs).maxCoeff() > 1e-12) return std::nullopt;
    return v;
  }
  Eigen::MatrixXd a(k, v.size());
  Vec b(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    a.row(r) = c.rows.row(active[static_cast<std::size_t>(r)]);
    b[r] = c.rhs[active[static_cast<std::size_t>(r)]];
  }
  // z = v - W^{-1} A^T lambda with A W^{-1} A^T lambda = A v - b.
  const Eigen::MatrixXd aw = a * w.cwiseInverse().asDiagonal();
  const Vec lambda = (aw * a.transpose()).completeOrthogonalDecomposition().solve(a * v - b);
  if (!lambda.allFinite() || lambda.minCoeff() < -1e-12) return std::nullopt;
  const Vec z = v - aw.transpose() * lambda;
  if (!z.allFinite() || (a * z - b).cwiseAbs().maxCoeff() > 1e-10) return std::nullopt;
  if ((c.rows * z - c.rhs).maxCoeff() > 1e-12) return std::nullopt;
  return z;
}

// Dykstra can crawl when constraints meet at shallow angles. First guess the
// active constraints from its iterate x; failing that, and if the problem is
// small, try every active set of at most d constraints.
std::optional<Vec> polish_active_set(const Polytope& poly, const Vec& w, const Vec& v, const Vec& x) {
  const Constraints c = polytope_constraints(poly);
  const Vec slackness = c.rhs - c.rows * x;
  for (double tol : {1e-9, 1e-7, 1e-5, 1e-3}) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index r = 0; r < slackness.size(); ++r) {
      if (slackness[r] <= tol) active.push_back(r);
    }
    if (auto z = kkt_point(c, active, w, v)) return z;
  }
  const Eigen::Index m = c.rows.rows();
  const Eigen::Index d = v.size();
  if (m > 24 || d > 6) return std::nullopt;
  // Combinations in lexicographic order, smaller sets first.
  for (Eigen::Index size = 1; size <= std::min(d, m); ++size) {
    std::vector<Eigen::Index> pick(static_cast<std::size_t>(size));
    for (Eigen::Index r = 0; r < size; ++r) pick[static_cast<std::size_t>(r)] = r;
    while (true) {
      if (auto z = kkt_point(c, pick, w, v)) return z;
      Eigen::Index r = size - 1;
      while (r >= 0 && pick[static_cast<std::size_t>(r)] == m - size + r) --r;
      if (r < 0) break;
      ++pick[static_cast<std::size_t>(r)];
      for (Eigen::Index q = r + 1; q < size; ++q) pick[static_cast<std::size_t>(q)] = pick[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  return std::nullopt;
}

Vec project_polytope(const Polytope& poly, const Vec& w, const Vec& v) {
  std::vector<PreparedHalfspace> hs;
  hs.reserve(poly.halfspaces.size());
  for (const auto& h : poly.halfspaces) {
    Vec dir = h.normal.cwiseQuotient(w);
    const double scale = h.normal.dot(dir);
    if (scale > 0) hs.push_back({&h, std::move(dir), scale});
  }
  Vec x = clamp(poly.box, v);
  if (hs.empty()) return x;
  x = v;
  std::vector<Vec> incr(hs.size() + 1, Vec::Zero(v.size()));
  // The iterate can sit still for a whole sweep while the corrections are
  // still moving, so the stopping test watches both.
  for (int sweep = 0; sweep < kDykstraSweeps; ++sweep) {
    const Vec before = x;
    double moved = 0.0;
    {
      Vec y = clamp(poly.box, x + incr[0]);
      Vec next = x + incr[0] - y;
      moved = std::max(moved, (next - incr[0]).lpNorm<Eigen::Infinity>());
      incr[0] = std::move(next);
      x = std::move(y);
    }
    for (std::size_t k = 0; k < hs.size(); ++k) {
      Vec y = x + incr[k + 1];
      const double excess = hs[k].h->normal.dot(y) - hs[k].h->offset;
      if (excess > 0) y -= (excess / hs[k].scale) * hs[k].direction;
      Vec next = x + incr[k + 1] - y;
      moved = std::max(moved, (next - incr[k + 1]).lpNorm<Eigen::Infinity>());
      incr[k + 1] = std::move(next);
      x = std::move(y);
    }
    moved = std::max(moved, (x - before).lpNorm<Eigen::Infinity>());
    if (moved <= kDykstraTol) break;
  }
  if (auto exact = polish_active_set(poly, w, v, x)) return *exact;
  return x;
}

std::vector<double> axis_values(double lo, double hi, int resolution) {
  if (lo == hi) return {lo};
  std::vector<double> out(static_cast<std::size_t>(resolution));
  for (int k = 0; k < resolution; ++k) {
    out[static_cast<std::size_t>(k)] = lo + k * (hi - lo) / (resolution - 1);
  }
  out.back() = hi;
  return out;
}

template <class Contains>
std::vector<Vec> grid_over(const Box& bb, int resolution, Contains&& keep) {
  if (resolution < 2) throw Error("sample_grid: resolution must be at least 2");
  const Eigen::Index d = bb.lower.size();
  std::vector<std::vector<double>> axes;
  for (Eigen::Index j = 0; j < d; ++j) axes.push_back(axis_values(bb.lower[j], bb.upper[j], resolution));
  std::vector<Vec> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  Vec point(d);
  while (true) {
    for (Eigen::Index j = 0; j < d; ++j) point[j] = axes[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
    if (keep(point)) out.push_back(point);
    // Odometer increment, last axis fastest.
    Eigen::Index j = d - 1;
    while (j >= 0) {
      auto& i = idx[static_cast<std::size_t>(j)];
      if (++i < axes[static_cast<std::size_t>(j)].size()) break;
      i = 0;
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

}  // namespace

Eigen::Index dim(const ConvexSet& s) {
  return std::visit(Overloaded{[](const Box& b) { return b.lower.size(); },
                               [](const Ball& b) { return b.center.size(); },
                               [](const Polytope& p) { return p.box.lower.size(); }},
                    s);
}

Box bounding_box(const ConvexSet& s) {
  return std::visit(
      Overloaded{[](const Box& b) { return b; },
                 [](const Ball& b) {
                   const Vec r = Vec::Constant(b.center.size(), b.radius);
                   return Box{b.center - r, b.center + r};
                 },
                 [](const Polytope& p) { return p.box; }},
      s);
}

Box bounding_box(const RealizedSet& s) {
  Box b = bounding_box(s.base);
  return {b.lower + s.shift, b.upper + s.shift};
}

double seminorm_eval(const SemiNorm& p, const Vec& v) {
  require_dim(p.dim(), v.size(), "seminorm_eval");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) acc += p.weights[j] * v[j] * v[j];
  return std::sqrt(acc);
}

double max_violation(const ConvexSet& s, const Vec& v) {
  require_dim(dim(s), v.size(), "max_violation");
  return std::visit(Overloaded{[&](const Box& b) { return box_violation(b, v); },
                               [&](const Ball& b) {
                                 return std::max(0.0, (v - b.center).norm() - b.radius);
                               },
                               [&](const Polytope& p) {
                                 double viol = box_violation(p.box, v);
                                 for (const auto& h : p.halfspaces) {
                                   viol = std::max(viol, h.normal.dot(v) - h.offset);
                                 }
                                 return viol;
                               }},
                    s);
}

double max_violation(const RealizedSet& s, const Vec& v) {
  require_dim(dim(s), v.size(), "max_violation");
  return max_violation(s.base, v - s.shift);
}

bool contains(const ConvexSet& s, const Vec& v, double tol) { return max_violation(s, v) <= tol; }

bool contains(const RealizedSet& s, const Vec& v, double tol) { return max_violation(s, v) <= tol; }

Projection project(const ConvexSet& s, const SemiNorm& p, const Vec& v) {
  require_dim(dim(s), v.size(), "project");
  require_dim(p.dim(), v.size(), "project");
  Vec point = std::visit(Overloaded{[&](const Box& b) { return clamp(b, v); },
                                    [&](const Ball& b) {
                                      require_positive(p, "ball");
                                      return project_ball(b, p.weights, v);
                                    },
                                    [&](const Polytope& poly) {
                                      require_positive(p, "polytope");
                                      return project_polytope(poly, p.weights, v);
                                    }},
                         s);
  const double d = seminorm_eval(p, v - point);
  return {std::move(point), d};
}

Projection project(const RealizedSet& s, const SemiNorm& p, const Vec& v) {
  require_dim(dim(s), v.size(), "project");
  Projection pr = project(s.base, p, v - s.shift);
  pr.point += s.shift;
  return pr;
}

double distance(const ConvexSet& s, const SemiNorm& p, const Vec& v) {
  return project(s, p, v).distance;
}

std::vector<Vec> sample_grid(const ConvexSet& s, int resolution) {
  return grid_over(bounding_box(s), resolution,
                   [&](const Vec& v) { return contains(s, v, kGridTol); });
}

std::vector<Vec> sample_grid(const RealizedSet& s, int resolution) {
  return grid_over(bounding_box(s), resolution,
                   [&](const Vec& v) { return contains(s, v, kGridTol); });
}

ConvexSet materialize(const RealizedSet& s) {
  return std::visit(Overloaded{[&](const Box& b) -> ConvexSet {
                                 return Box{b.lower + s.shift, b.upper + s.shift};
                               },
                               [&](const Ball& b) -> ConvexSet { return Ball{b.center + s.shift, b.radius}; },
                               [&](const Polytope& p) -> ConvexSet {
                                 Polytope out{{p.box.lower + s.shift, p.box.upper + s.shift}, p.halfspaces};
                                 for (auto& h : out.halfspaces) h.offset += h.normal.dot(s.shift);
                                 return out;
                               }},
                    s.base);
}

std::string check_set(const ConvexSet& s) {
  auto check_box = [](const Box& b) -> std::string {
    if (b.lower.size() != b.upper.size()) return "lower and upper bounds differ in dimension";
    for (Eigen::Index j = 0; j < b.lower.size(); ++j) {
      if (!std::isfinite(b.lower[j]) || !std::isfinite(b.upper[j])) {
        return "non-finite bound at coordinate " + std::to_string(j + 1);
      }
      if (b.lower[j] > b.upper[j]) {
        return "lower <= upper violated at coordinate " + std::to_string(j + 1);
      }
    }
    return {};
  };
  return std::visit(
      Overloaded{[&](const Box& b) { return check_box(b); },
                 [](const Ball& b) -> std::string {
                   if (!b.center.allFinite()) return "non-finite ball center";
                   if (!std::isfinite(b.radius) || !(b.radius > 0)) {
                     return "ball radius must be positive and finite";
                   }
                   return {};
                 },
                 [&](const Polytope& p) -> std::string {
                   if (auto msg = check_box(p.box); !msg.empty()) return msg;
                   for (std::size_t k = 0; k < p.halfspaces.size(); ++k) {
                     const auto& h = p.halfspaces[k];
                     if (h.normal.size() != p.box.lower.size()) {
                       return "halfspace " + std::to_string(k + 1) + " has wrong dimension";
                     }
                     if (!h.normal.allFinite() || !std::isfinite(h.offset)) {
                       return "halfspace " + std::to_string(k + 1) + " is not finite";
                     }
                   }
                   // Feasibility probe: project the box midpoint and test membership.
                   const Vec mid = 0.5 * (p.box.lower + p.box.upper);
                   const Vec probe = project_polytope(p, Vec::Ones(mid.size()), mid);
                   if (!contains(ConvexSet{p}, probe, kGridTol)) return "polytope is empty";
                   return {};
                 }},
      s);
}

}  // namespace bestapprox
