#pragma once

// Radial interaction kernels W(x) = U(|x|).
//
// The scalar kernels are templated so they can be evaluated in extended
// precision; everything downstream of them works in double.

#include "swarm/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <variant>

namespace swarm {

/// U(r) = -C_A exp(-r/ell_A) + C_R exp(-r/ell_R)
struct Morse {
  double C_A = 1.0;
  double ell_A = 1.0;
  double C_R = 1.0;
  double ell_R = 1.0;
};

/// U(r) = V(r) - C V(r/l) with V(r) = -exp(-r^p / p)
struct QuasiMorse {
  double C = 1.0;
  double l = 1.0;
  double p = 1.0;
};

/// U(r) = r^a/a - r^b/b, a > b > 0
struct PowerLaw {
  double a = 2.0;
  double b = 1.0;
};

/// W = 0. Used for free self-propelled dynamics.
struct NoInteraction {};

using RadialPotential = std::variant<Morse, QuasiMorse, PowerLaw, NoInteraction>;

/// Throws ConfigError when family parameters violate their invariants.
void validate(const RadialPotential& pot);

std::string family_name(const RadialPotential& pot);

/// True when |U'(r)| -> infinity as r -> 0+, i.e. coincident agents are fatal.
bool singular_at_origin(const RadialPotential& pot);

namespace kernel {

template <typename T>
T quasi_morse_V(const T& r, const T& p)
{
  using std::exp;
  using std::pow;
  return -exp(-pow(r, p) / p);
}

template <typename T>
T quasi_morse_dV(const T& r, const T& p)
{
  using std::exp;
  using std::pow;
  return pow(r, p - 1) * exp(-pow(r, p) / p);
}

template <typename T>
T quasi_morse_d2V(const T& r, const T& p)
{
  using std::exp;
  using std::pow;
  const T rp = pow(r, p);
  return ((p - 1) * pow(r, p - 2) - pow(r, 2 * p - 2)) * exp(-rp / p);
}

template <typename T>
T value(const Morse& m, const T& r)
{
  using std::exp;
  return -T(m.C_A) * exp(-r / T(m.ell_A)) + T(m.C_R) * exp(-r / T(m.ell_R));
}
template <typename T>
T deriv(const Morse& m, const T& r)
{
  using std::exp;
  return T(m.C_A) / T(m.ell_A) * exp(-r / T(m.ell_A)) - T(m.C_R) / T(m.ell_R) * exp(-r / T(m.ell_R));
}
template <typename T>
T second_deriv(const Morse& m, const T& r)
{
  using std::exp;
  const T la = m.ell_A, lr = m.ell_R;
  return -T(m.C_A) / (la * la) * exp(-r / la) + T(m.C_R) / (lr * lr) * exp(-r / lr);
}

template <typename T>
T value(const QuasiMorse& q, const T& r)
{
  const T p = q.p;
  return quasi_morse_V(r, p) - T(q.C) * quasi_morse_V(T(r / T(q.l)), p);
}
template <typename T>
T deriv(const QuasiMorse& q, const T& r)
{
  const T p = q.p, l = q.l;
  return quasi_morse_dV(r, p) - T(q.C) / l * quasi_morse_dV(T(r / l), p);
}
template <typename T>
T second_deriv(const QuasiMorse& q, const T& r)
{
  const T p = q.p, l = q.l;
  return quasi_morse_d2V(r, p) - T(q.C) / (l * l) * quasi_morse_d2V(T(r / l), p);
}

template <typename T>
T value(const PowerLaw& w, const T& r)
{
  using std::pow;
  const T a = w.a, b = w.b;
  return pow(r, a) / a - pow(r, b) / b;
}
template <typename T>
T deriv(const PowerLaw& w, const T& r)
{
  using std::pow;
  const T a = w.a, b = w.b;
  return pow(r, a - 1) - pow(r, b - 1);
}
template <typename T>
T second_deriv(const PowerLaw& w, const T& r)
{
  using std::pow;
  const T a = w.a, b = w.b;
  return (a - 1) * pow(r, a - 2) - (b - 1) * pow(r, b - 2);
}

template <typename T>
T value(const NoInteraction&, const T&) { return T(0); }
template <typename T>
T deriv(const NoInteraction&, const T&) { return T(0); }
template <typename T>
T second_deriv(const NoInteraction&, const T&) { return T(0); }

}  // namespace kernel

/// U(r). DomainError for r < 0, SingularityError if the value at r = 0 is infinite.
double potential_value(const RadialPotential& pot, double r);

/// U'(r). At r = 0 returns the finite one-sided limit or throws SingularityError.
double potential_deriv(const RadialPotential& pot, double r);

/// U''(r), same conventions as potential_deriv.
double potential_second_deriv(const RadialPotential& pot, double r);

/// grad W(d) = U'(|d|) d/|d|.
///
/// Below `guard` raises CollisionError unless U'(0+) = 0, in which case
/// coincident agents exert no pair force.
Vec2 pair_gradient(const RadialPotential& pot, const Vec2& d, double guard = kGuardRadius);

/// Hess W(d) = U'' dd^T + (U'/r)(I - dd^T), d the unit direction.
Mat2 hessian_W(const RadialPotential& pot, const Vec2& d, double guard = kGuardRadius);

/// Fast path used by the force loops: returns U'(r)/r for r above the guard.
double deriv_over_r(const RadialPotential& pot, double r);

}  // namespace swarm
