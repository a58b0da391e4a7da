#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bestapprox/catalog.hpp"
#include "bestapprox/geometry.hpp"
#include "bestapprox/model.hpp"

namespace testing {

using bestapprox::Profile;
using bestapprox::Vec;

inline bestapprox::GameInstance bundled(const std::string& name) {
  return bestapprox::load_instance(*bestapprox::catalog_instance(name));
}

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Profile& a, const Profile& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_abs_diff(a[i], b[i]));
  return m;
}

inline const double kSqrt2 = std::sqrt(2.0);

// The solution of the two-player example and its auxiliary best responses.
inline Profile example_x() { return {vec({1, 1}), vec({1, 1})}; }
inline Profile example_y() { return {vec({1 + kSqrt2, 1 + kSqrt2}), vec({2, 2})}; }


// Random convex sets for the projection properties. Every polytope halfspace
// keeps one common point of the box, so no polytope is empty.
struct ProjectionCase {
  bestapprox::ConvexSet set;
  bestapprox::SemiNorm norm;
  Vec point;
  Vec other;
};

inline ProjectionCase random_projection_case(std::mt19937_64& rng, int index) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const int d = 1 + index % 3;
  const int variant = (index / 3) % 3;
  ProjectionCase c;
  c.norm.weights = Vec(d);
  for (int j = 0; j < d; ++j) c.norm.weights[j] = uniform(0.2, 3.0);
  Vec lo(d), hi(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = uniform(-2.0, 1.0);
    hi[j] = lo[j] + uniform(0.1, 2.0);
  }
  if (variant == 0) {
    c.set = bestapprox::Box{lo, hi};
  } else if (variant == 1) {
    Vec center(d);
    for (int j = 0; j < d; ++j) center[j] = uniform(-1.0, 1.0);
    c.set = bestapprox::Ball{center, uniform(0.1, 2.0)};
  } else {
    bestapprox::Polytope poly{bestapprox::Box{lo, hi}, {}};
    Vec inside(d);
    for (int j = 0; j < d; ++j) inside[j] = uniform(lo[j], hi[j]);
    const int m = 1 + static_cast<int>(unit(rng) * 2.0);
    for (int h = 0; h < m; ++h) {
      Vec n(d);
      for (int j = 0; j < d; ++j) n[j] = uniform(-1.0, 1.0);
      poly.halfspaces.push_back({n, n.dot(inside) + uniform(0.0, 0.3)});
    }
    c.set = poly;
  }
  c.point = Vec(d);
  c.other = Vec(d);
  for (int j = 0; j < d; ++j) {
    c.point[j] = uniform(-4.0, 4.0);
    c.other[j] = uniform(-4.0, 4.0);
  }
  return c;
}

struct ProjectionTally {
  int cases = 0;
  int idempotence = 0;
  int grid_optimality = 0;
  int nonexpansive = 0;
  int membership = 0;
  bool ok() const { return idempotence == 0 && grid_optimality == 0 && nonexpansive == 0 && membership == 0; }
};

// Idempotence, optimality against the resolution-50 grid, nonexpansiveness
// and membership, counted over `cases` random (set, point) pairs.
inline ProjectionTally projection_properties(int cases, std::uint64_t seed) {
  using namespace bestapprox;
  std::mt19937_64 rng(seed);
  ProjectionTally t;
  for (int n = 0; n < cases; ++n) {
    const ProjectionCase c = random_projection_case(rng, n);
    ++t.cases;
    const Projection pv = project(c.set, c.norm, c.point);
    const Projection pw = project(c.set, c.norm, c.other);
    if (!contains(c.set, pv.point, 1e-9)) ++t.membership;
    const Projection again = project(c.set, c.norm, pv.point);
    if (max_abs_diff(again.point, pv.point) > 1e-9) ++t.idempotence;
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& g : sample_grid(c.set, 50)) best = std::min(best, seminorm_eval(c.norm, c.point - g));
    if (pv.distance > best + 1e-9) ++t.grid_optimality;
    if (seminorm_eval(c.norm, pv.point - pw.point) > seminorm_eval(c.norm, c.point - c.other) + 1e-9) {
      ++t.nonexpansive;
    }
  }
  return t;
}

}  // namespace testing
