#include "swarm/geometry.hpp"

#include "swarm/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swarm {

std::vector<Eigen::Index> convex_hull(const Points& x)
{
  const Eigen::Index n = x.cols();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (x(0, a) != x(0, b)) return x(0, a) < x(0, b);
    if (x(1, a) != x(1, b)) return x(1, a) < x(1, b);
    return a < b;
  });
  if (n < 3) return idx;
  auto turn = [&](Eigen::Index o, Eigen::Index a, Eigen::Index b) {
    return cross(x.col(a) - x.col(o), x.col(b) - x.col(o));
  };
  std::vector<Eigen::Index> hull(2 * static_cast<std::size_t>(n));
  std::size_t k = 0;
  for (Eigen::Index i : idx) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], i) <= 0) --k;
    hull[k++] = i;
  }
  const std::size_t lower = k + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

OuterVertex outer_vertex(const Points& x, double guard)
{
  const Eigen::Index n = x.cols();
  if (n < 2) throw GeometryError("outer_vertex needs at least two agents");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if ((x.col(i) - x.col(j)).norm() < guard) throw GeometryError("outer_vertex: coincident agents");

  const auto hull = convex_hull(x);
  OuterVertex best;
  if (hull.size() == 2 || (n == 2)) {
    const Eigen::Index a = std::min(hull.front(), hull.back());
    const Eigen::Index b = std::max(hull.front(), hull.back());
    best.index = a;
    best.bisector = (x.col(a) - x.col(b)).normalized();
    best.internal_angle = 0.0;
    return best;
  }
  const std::size_t h = hull.size();
  best.internal_angle = 10.0;
  for (std::size_t k = 0; k < h; ++k) {
    const Eigen::Index i = hull[k];
    const Vec2 a = (x.col(hull[(k + h - 1) % h]) - x.col(i)).normalized();
    const Vec2 b = (x.col(hull[(k + 1) % h]) - x.col(i)).normalized();
    const double ang = std::atan2(std::abs(cross(a, b)), a.dot(b));
    const bool better = ang < best.internal_angle - 1e-12 ||
                        (std::abs(ang - best.internal_angle) <= 1e-12 && i < best.index);
    if (better) {
      best.index = i;
      best.internal_angle = ang;
      best.bisector = -(a + b).normalized();
    }
  }
  return best;
}

namespace {

Circle from_two(const Vec2& a, const Vec2& b)
{
  return {(a + b) / 2, (a - b).norm() / 2};
}

Circle from_three(const Vec2& a, const Vec2& b, const Vec2& c)
{
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2 * cross(ab, ac);
  if (std::abs(d) < 1e-300) {
    // collinear: the widest pair
    Circle best = from_two(a, b);
    for (const Circle& cand : {from_two(a, c), from_two(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const Vec2 off((ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm()) / d,
                 (ab.x() * ac.squaredNorm() - ac.x() * ab.squaredNorm()) / d);
  return {a + off, off.norm()};
}

bool inside(const Circle& c, const Vec2& p)
{
  return (p - c.center).norm() <= c.radius * (1 + 1e-12) + 1e-14;
}

}  // namespace

Circle minimal_enclosing_circle(const Points& x)
{
  const Eigen::Index n = x.cols();
  if (n == 0) return {};
  std::vector<Vec2> p(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = x.col(i);
  SplitMix64 rng(0x5eedc1c1eULL);
  for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng.next() % i]);

  // iterative Welzl with up to three boundary points
  Circle c{p[0], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (inside(c, p[i])) continue;
    c = {p[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, p[j])) continue;
      c = from_two(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!inside(c, p[k])) c = from_three(p[i], p[j], p[k]);
    }
  }
  return c;
}

}  // namespace swarm
