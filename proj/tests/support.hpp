#pragma once

#include "swarm/random.hpp"
#include "swarm/types.hpp"

#include <functional>

namespace swarm::test {

inline Points random_points(SplitMix64& rng, Eigen::Index n, double half_width)
{
  Points x(2, n);
  for (Eigen::Index i = 0; i < n; ++i) x.col(i) = Vec2(rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width));
  return x;
}

inline Vec2 random_vec(SplitMix64& rng, double lo, double hi)
{
  const double r = rng.uniform(lo, hi);
  const double a = rng.uniform(0.0, 6.283185307179586);
  return {r * std::cos(a), r * std::sin(a)};
}

/// Central difference of a vector-valued map, one column per input coordinate.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h)
{
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    J.col(k) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

}  // namespace swarm::test
