#include <doctest.h>

#include <cmath>
#include <random>

#include "bestapprox/error.hpp"
#include "bestapprox/geometry.hpp"
#include "support.hpp"

using namespace bestapprox;
using testing::vec;

namespace {

const SemiNorm kEuclid2{vec({1, 1})};

Polytope example_set() {
  return Polytope{Box{vec({0, 0}), vec({1, 1})}, {Halfspace{vec({-1, -1}), -1}}};
}

// Minimum of p(v - g) over a uniform grid of the bounding box, restricted to
// the set. Independent of project().
double grid_distance(const ConvexSet& s, const SemiNorm& p, const Vec& v, double step, Vec* argmin) {
  const Box bb = bounding_box(s);
  double best = std::numeric_limits<double>::infinity();
  const int n0 = static_cast<int>(std::lround((bb.upper[0] - bb.lower[0]) / step));
  const int n1 = static_cast<int>(std::lround((bb.upper[1] - bb.lower[1]) / step));
  for (int a = 0; a <= n0; ++a) {
    for (int b = 0; b <= n1; ++b) {
      const Vec g = vec({bb.lower[0] + a * step, bb.lower[1] + b * step});
      if (!contains(s, g, 1e-12)) continue;
      const double d = seminorm_eval(p, v - g);
      if (d < best) {
        best = d;
        if (argmin) *argmin = g;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("seminorm values") {
  CHECK(seminorm_eval(kEuclid2, vec({3, 4})) == 5.0);
  CHECK(seminorm_eval(SemiNorm{vec({0, 1})}, vec({100, 2})) == 2.0);
  CHECK(seminorm_eval(SemiNorm{vec({4, 1})}, vec({1, 2})) == doctest::Approx(std::sqrt(8.0)));
  CHECK(seminorm_eval(kEuclid2, vec({0, 0})) == 0.0);
  CHECK_THROWS_AS(seminorm_eval(kEuclid2, vec({1, 2, 3})), DimensionError);
  CHECK(kEuclid2.is_norm());
  CHECK_FALSE(SemiNorm{vec({0, 1})}.is_norm());
}

TEST_CASE("seminorm axioms on random vectors") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5), w(0, 3);
  for (int n = 0; n < 1000; ++n) {
    const int d = 1 + n % 4;
    SemiNorm p{Vec(d)};
    Vec a(d), b(d);
    for (int j = 0; j < d; ++j) {
      p.weights[j] = (n % 5 == 0 && j == 0) ? 0.0 : w(rng);
      a[j] = u(rng);
      b[j] = u(rng);
    }
    const double alpha = u(rng);
    CHECK(seminorm_eval(p, a) >= 0.0);
    CHECK(seminorm_eval(p, a + b) <= seminorm_eval(p, a) + seminorm_eval(p, b) + 1e-12);
    CHECK(std::abs(seminorm_eval(p, alpha * a) - std::abs(alpha) * seminorm_eval(p, a)) <= 1e-12);
  }
}

TEST_CASE("membership") {
  CHECK(contains(ConvexSet{Box{vec({0, 0}), vec({1, 1})}}, vec({0.5, 0.5}), 1e-9));
  CHECK_FALSE(contains(ConvexSet{example_set()}, vec({0.4, 0.4}), 1e-9));
  CHECK(contains(ConvexSet{example_set()}, vec({0.5, 0.5}), 1e-9));
  const double r2 = testing::kSqrt2;
  const RealizedSet shifted{vec({r2, r2}), Box{vec({0, 0}), vec({1, 1})}};
  CHECK(contains(shifted, vec({1 + r2, 1 + r2}), 1e-9));
  CHECK_FALSE(contains(shifted, vec({1, 1}), 1e-9));
  CHECK(max_violation(shifted, vec({1, 1})) == doctest::Approx(r2 - 1));
  CHECK_THROWS_AS(contains(ConvexSet{example_set()}, vec({1}), 1e-9), DimensionError);
}

TEST_CASE("projection examples") {
  const Projection clamp = project(ConvexSet{Box{vec({0, 0}), vec({1, 1})}}, kEuclid2, vec({2, -1}));
  CHECK(testing::max_abs_diff(clamp.point, vec({1, 0})) == 0.0);
  CHECK(clamp.distance == doctest::Approx(testing::kSqrt2));

  const double r2 = testing::kSqrt2;
  const Vec far = vec({1 + r2, 1 + r2});
  const Projection onto = project(ConvexSet{example_set()}, kEuclid2, far);
  CHECK(testing::max_abs_diff(onto.point, vec({1, 1})) <= 1e-9);
  CHECK(onto.distance == doctest::Approx(2.0).epsilon(1e-12));
  Vec g;
  const double oracle = grid_distance(example_set(), kEuclid2, far, 1e-3, &g);
  CHECK(testing::max_abs_diff(g, vec({1, 1})) <= 1e-12);
  CHECK(std::abs(oracle - onto.distance) <= 1e-9);

  const Vec inside = vec({0.3, 0.9});
  const Projection same = project(ConvexSet{example_set()}, kEuclid2, inside);
  CHECK(testing::max_abs_diff(same.point, inside) <= 1e-12);
  CHECK(same.distance <= 1e-12);
}

TEST_CASE("distance examples") {
  const ConvexSet box = Box{vec({0, 0}), vec({1, 1})};
  CHECK(distance(box, kEuclid2, vec({0.5, 0.5})) == 0.0);
  CHECK(distance(box, kEuclid2, vec({2, 2})) == doctest::Approx(testing::kSqrt2));
  const double d = distance(ConvexSet{example_set()}, kEuclid2, vec({2, 2}));
  CHECK(d == doctest::Approx(testing::kSqrt2).epsilon(1e-12));
  CHECK(std::abs(grid_distance(example_set(), kEuclid2, vec({2, 2}), 1e-3, nullptr) - d) <= 1e-9);
}

TEST_CASE("weighted ball projection matches a grid search") {
  const Ball ball{vec({0.5, -0.2}), 1.3};
  const SemiNorm p{vec({4.0, 0.25})};
  for (const Vec& v : {vec({3, 2}), vec({-2, 0.1}), vec({0.5, 5}), vec({1.4, -1.4})}) {
    const Projection pr = project(ConvexSet{ball}, p, v);
    CHECK(contains(ConvexSet{ball}, pr.point, 1e-9));
    const double oracle = grid_distance(ball, p, v, 2e-3, nullptr);
    CHECK(pr.distance <= oracle + 1e-9);
    CHECK(pr.distance >= oracle - 1e-2);
  }
  // Equal weights reduce to the radial contraction.
  const Projection radial = project(ConvexSet{Ball{vec({0, 0}), 1.0}}, SemiNorm{vec({2, 2})}, vec({3, 4}));
  CHECK(testing::max_abs_diff(radial.point, vec({0.6, 0.8})) <= 1e-12);
}

TEST_CASE("zero weights") {
  const SemiNorm p{vec({0, 1})};
  const ConvexSet box = Box{vec({0, 0}), vec({1, 1})};
  const Projection pr = project(box, p, vec({5, 3}));
  // The zero-weight coordinate is clamped, not left free.
  CHECK(testing::max_abs_diff(pr.point, vec({1, 1})) == 0.0);
  CHECK(pr.distance == 2.0);
  CHECK_THROWS_AS(project(ConvexSet{Ball{vec({0, 0}), 1.0}}, p, vec({5, 3})), UnsupportedError);
  CHECK_THROWS_AS(project(ConvexSet{example_set()}, p, vec({5, 3})), UnsupportedError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 0; n < 1000; ++n) {
    const Box b{vec({-1, 0, 0.5}), vec({1, 0.5, 2})};
    const SemiNorm q{vec({0, u(rng) * u(rng) + 0.1, 0})};
    const Vec v = vec({u(rng), u(rng), u(rng)});
    const Projection r = project(ConvexSet{b}, q, v);
    const Vec clamped = v.cwiseMax(b.lower).cwiseMin(b.upper);
    CHECK(testing::max_abs_diff(r.point, clamped) == 0.0);
  }
}

TEST_CASE("projection properties over random sets") {
  const testing::ProjectionTally t = testing::projection_properties(1000, 99);
  CHECK(t.cases == 1000);
  CHECK(t.membership == 0);
  CHECK(t.idempotence == 0);
  CHECK(t.grid_optimality == 0);
  CHECK(t.nonexpansive == 0);
}

TEST_CASE("grid sampling") {
  const auto line = sample_grid(ConvexSet{Box{vec({0}), vec({1})}}, 3);
  REQUIRE(line.size() == 3);
  CHECK(line[0][0] == 0.0);
  CHECK(line[1][0] == 0.5);
  CHECK(line[2][0] == 1.0);

  const auto pts = sample_grid(ConvexSet{example_set()}, 3);
  const std::vector<Vec> want = {vec({0, 1}), vec({0.5, 0.5}), vec({0.5, 1}),
                                 vec({1, 0}), vec({1, 0.5}), vec({1, 1})};
  REQUIRE(pts.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(testing::max_abs_diff(pts[k], want[k]) == 0.0);

  const auto ball = sample_grid(ConvexSet{Ball{vec({0}), 1.0}}, 3);
  REQUIRE(ball.size() == 3);
  CHECK(ball[0][0] == -1.0);
  CHECK(ball[1][0] == 0.0);
  CHECK(ball[2][0] == 1.0);

  const RealizedSet shifted{vec({2, 3}), Box{vec({0, 0}), vec({1, 1})}};
  const auto sp = sample_grid(shifted, 2);
  REQUIRE(sp.size() == 4);
  CHECK(testing::max_abs_diff(sp.back(), vec({3, 4})) == 0.0);

  CHECK_THROWS(sample_grid(ConvexSet{Box{vec({0}), vec({1})}}, 1));
}

TEST_CASE("set validation") {
  CHECK(check_set(ConvexSet{Box{vec({0, 0}), vec({1, -1})}}).find("lower <= upper violated at coordinate 2") !=
        std::string::npos);
  CHECK(check_set(ConvexSet{example_set()}).empty());
  Polytope empty = example_set();
  empty.halfspaces.push_back({vec({1, 1}), 0.5});
  CHECK_FALSE(check_set(ConvexSet{empty}).empty());
  CHECK_FALSE(check_set(ConvexSet{Ball{vec({0}), -1.0}}).empty());
}
