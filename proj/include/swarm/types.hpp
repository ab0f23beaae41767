#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace swarm {

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;

using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;

/// One column per agent.
using Points = Eigen::Matrix2Xd;

/// Distances below this are treated as collisions for singular kernels.
inline constexpr double kGuardRadius = 1e-9;

/// Counter-clockwise rotation by pi/2.
template <typename Derived>
inline Vec2T<typename Derived::Scalar> perp(const Eigen::MatrixBase<Derived>& d)
{
  return {-d(1), d(0)};
}

template <typename Scalar>
inline Mat2T<Scalar> rotation(Scalar theta)
{
  using std::cos;
  using std::sin;
  Mat2T<Scalar> r;
  r << cos(theta), -sin(theta), sin(theta), cos(theta);
  return r;
}

inline double cross(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

struct ModelParams {
  double alpha = 1.0;  // self-propulsion, >= 0
  double beta = 1.0;   // friction, > 0
  double M = 1.0;      // sup-norm control bound, > 0
  int N = 2;           // agent count, >= 2

  double cruise_speed() const { return std::sqrt(alpha / beta); }
  void validate() const;
};

struct SwarmState {
  double t = 0.0;
  Points x;
  Points v;

  SwarmState() = default;
  explicit SwarmState(Eigen::Index n) : x(Points::Zero(2, n)), v(Points::Zero(2, n)) {}
  SwarmState(double time, Points pos, Points vel) : t(time), x(std::move(pos)), v(std::move(vel)) {}

  Eigen::Index size() const { return x.cols(); }
  bool finite() const { return x.allFinite() && v.allFinite(); }
};

// Error hierarchy. The CLI maps ConfigError to exit code 2 and
// NumericError (collisions, non-finite states) to exit code 3.

class SwarmError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public SwarmError {
public:
  using SwarmError::SwarmError;
};

class DomainError : public SwarmError {
public:
  using SwarmError::SwarmError;
};

class NumericError : public SwarmError {
public:
  using SwarmError::SwarmError;
};

class SingularityError : public NumericError {
public:
  using NumericError::NumericError;
};

class CollisionError : public NumericError {
public:
  CollisionError(Eigen::Index i, Eigen::Index j, double distance, double t = std::nan(""));
  Eigen::Index first;
  Eigen::Index second;
  double distance;
  double time;
};

class NonFiniteError : public NumericError {
public:
  NonFiniteError(double t, const std::string& what);
};

class ThresholdError : public SwarmError {
public:
  using SwarmError::SwarmError;
};

class PhaseTimeoutError : public SwarmError {
public:
  PhaseTimeoutError(std::string phase, std::string predicate, double t);
  std::string phase;
  std::string predicate;
};

class GeometryError : public SwarmError {
public:
  using SwarmError::SwarmError;
};

class TrackingError : public SwarmError {
public:
  using SwarmError::SwarmError;
};

}  // namespace swarm
