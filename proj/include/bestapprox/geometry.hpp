#pragma once

#include <Eigen/Core>

#include <string>
#include <variant>
#include <vector>

namespace bestapprox {

using Vec = Eigen::VectorXd;

/// Diagonal weighted-Euclidean semi-norm p(v) = sqrt(sum_j w_j v_j^2).
/// A zero weight turns p into a genuine semi-norm.
struct SemiNorm {
  Vec weights;

  static SemiNorm euclidean(Eigen::Index dim) { return {Vec::Ones(dim)}; }
  Eigen::Index dim() const { return weights.size(); }
  bool is_norm() const { return weights.size() == 0 || weights.minCoeff() > 0; }
};

struct Box {
  Vec lower;
  Vec upper;
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

/// normal . z <= offset
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

struct Polytope {
  Box box;
  std::vector<Halfspace> halfspaces;
};

using ConvexSet = std::variant<Box, Ball, Polytope>;

/// The set shift + base.
struct RealizedSet {
  Vec shift;
  ConvexSet base;
};

struct Projection {
  Vec point;
  double distance = 0.0;
};

Eigen::Index dim(const ConvexSet& s);
inline Eigen::Index dim(const RealizedSet& s) { return s.shift.size(); }

/// Axis-aligned bounding box.
Box bounding_box(const ConvexSet& s);
Box bounding_box(const RealizedSet& s);

double seminorm_eval(const SemiNorm& p, const Vec& v);

/// Largest violation of the defining inequalities at v (0 inside the set).
double max_violation(const ConvexSet& s, const Vec& v);
double max_violation(const RealizedSet& s, const Vec& v);

bool contains(const ConvexSet& s, const Vec& v, double tol);
bool contains(const RealizedSet& s, const Vec& v, double tol);

/// Best approximation of v in S under p.
///
/// Boxes accept any nonnegative weights: the clamp is returned, which among
/// all p-minimizers is also the Euclidean-nearest one. Balls and polytopes
/// need strictly positive weights and throw UnsupportedError otherwise.
/// Polytopes are handled by Dykstra's alternating projections in the
/// weighted inner product.
Projection project(const ConvexSet& s, const SemiNorm& p, const Vec& v);
Projection project(const RealizedSet& s, const SemiNorm& p, const Vec& v);

/// d_p(v, S) = inf over u in S of p(v - u).
double distance(const ConvexSet& s, const SemiNorm& p, const Vec& v);

/// Lexicographically ordered grid of the bounding box (`resolution` points
/// per non-degenerate axis) filtered by contains(., 1e-9).
std::vector<Vec> sample_grid(const ConvexSet& s, int resolution);
std::vector<Vec> sample_grid(const RealizedSet& s, int resolution);

/// The same set expressed without a shift.
ConvexSet materialize(const RealizedSet& s);

/// Checks bounds ordering, finiteness and (for polytopes) nonemptiness.
/// Returns an empty string when the set is well formed.
std::string check_set(const ConvexSet& s);

}  // namespace bestapprox
