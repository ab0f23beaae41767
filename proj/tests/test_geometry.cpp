#include "support.hpp"

#include "swarm/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace swarm;

namespace {

// Extreme points by brute force: i is a hull vertex iff some edge (i, j)
// has every other point strictly on one side.
std::set<Eigen::Index> brute_hull(const Points& x)
{
  std::set<Eigen::Index> out;
  const Eigen::Index n = x.cols();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      bool left = true;
      for (Eigen::Index k = 0; k < n && left; ++k)
        if (k != i && k != j) left = cross(x.col(j) - x.col(i), x.col(k) - x.col(i)) > 0;
      if (left) {
        out.insert(i);
        out.insert(j);
      }
    }
  return out;
}

Circle circle_through(const Vec2& a, const Vec2& b, const Vec2& c)
{
  const double d = 2 * (a(0) * (b(1) - c(1)) + b(0) * (c(1) - a(1)) + c(0) * (a(1) - b(1)));
  if (std::abs(d) < 1e-14) return {Vec2::Zero(), std::numeric_limits<double>::infinity()};
  const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  const Vec2 ctr((a2 * (b(1) - c(1)) + b2 * (c(1) - a(1)) + c2 * (a(1) - b(1))) / d,
                 (a2 * (c(0) - b(0)) + b2 * (a(0) - c(0)) + c2 * (b(0) - a(0))) / d);
  return {ctr, (a - ctr).norm()};
}

double brute_mec_radius(const Points& x)
{
  const Eigen::Index n = x.cols();
  double best = std::numeric_limits<double>::infinity();
  auto covers = [&](const Circle& c) {
    for (Eigen::Index k = 0; k < n; ++k)
      if ((x.col(k) - c.center).norm() > c.radius * (1 + 1e-12) + 1e-12) return false;
    return true;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Circle c{(x.col(i) + x.col(j)) / 2, (x.col(i) - x.col(j)).norm() / 2};
      if (covers(c)) best = std::min(best, c.radius);
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const Circle t = circle_through(x.col(i), x.col(j), x.col(k));
        if (std::isfinite(t.radius) && covers(t)) best = std::min(best, t.radius);
      }
    }
  return best;
}

}  // namespace

TEST_CASE("convex hull matches the brute-force extreme points")
{
  SplitMix64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.uniform() * 30);
    const Points x = test::random_points(rng, n, 2.0);
    const std::vector<Eigen::Index> h = convex_hull(x);
    CHECK(std::set<Eigen::Index>(h.begin(), h.end()) == brute_hull(x));
    for (std::size_t k = 0; k < h.size(); ++k) {
      const Vec2 a = x.col(h[k]), b = x.col(h[(k + 1) % h.size()]);
      for (Eigen::Index m = 0; m < n; ++m) CHECK(cross(b - a, Vec2(x.col(m)) - a) >= -1e-12);
    }
  }
}

TEST_CASE("hull drops collinear boundary points")
{
  Points x(2, 5);
  x << 0, 1, 2, 2, 0, 0, 0, 0, 2, 2;
  const std::vector<Eigen::Index> h = convex_hull(x);
  CHECK(h.size() == 4);
  CHECK(std::find(h.begin(), h.end(), 1) == h.end());
}

TEST_CASE("outer vertex has the sharpest angle of the hull")
{
  SplitMix64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Points x = test::random_points(rng, 12, 1.0);
    const OuterVertex ov = outer_vertex(x);
    const std::vector<Eigen::Index> h = convex_hull(x);
    const std::size_t m = h.size();
    CHECK(ov.bisector.norm() == doctest::Approx(1.0));
    double sharpest = 10.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 p = x.col(h[k]);
      const Vec2 a = Vec2(x.col(h[(k + m - 1) % m])) - p, b = Vec2(x.col(h[(k + 1) % m])) - p;
      sharpest = std::min(sharpest, std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)));
    }
    CHECK(ov.internal_angle == doctest::Approx(sharpest));
    CHECK(ov.internal_angle <= std::numbers::pi * (1.0 - 2.0 / m) + 1e-12);
  }
}

TEST_CASE("outer vertex of collinear and degenerate clouds")
{
  Points line(2, 3);
  line << 0, 1, 3, 0, 1, 3;
  const OuterVertex ov = outer_vertex(line);
  CHECK(ov.internal_angle == 0.0);
  const Vec2 axis = Vec2(1, 1).normalized();
  CHECK(std::abs(std::abs(ov.bisector.dot(axis)) - 1.0) < 1e-12);
  Points same(2, 2);
  same << 1, 1, 2, 2;
  CHECK_THROWS_AS(outer_vertex(same), GeometryError);
}

TEST_CASE("minimal enclosing circle against exhaustive search")
{
  SplitMix64 rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    const Points x = test::random_points(rng, 10, 3.0);
    const Circle c = minimal_enclosing_circle(x);
    for (Eigen::Index k = 0; k < x.cols(); ++k) CHECK((x.col(k) - c.center).norm() <= c.radius * (1 + 1e-10));
    CHECK(c.radius == doctest::Approx(brute_mec_radius(x)).epsilon(1e-10));
  }
}
