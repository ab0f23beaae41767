#include "swarm/potential.hpp"

#include <sstream>

namespace swarm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonneg(double r, const char* what)
{
  if (!(r >= 0.0)) {
    std::ostringstream os;
    os << what << ": negative radius " << r;
    throw DomainError(os.str());
  }
}

double checked(double value, double r, const char* what)
{
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << what << ": non-finite value at r = " << r;
    throw SingularityError(os.str());
  }
  return value;
}

}  // namespace

void validate(const RadialPotential& pot)
{
  std::visit(overloaded{
                 [](const Morse& m) {
                   if (!(m.C_A > 0 && m.ell_A > 0 && m.C_R > 0 && m.ell_R > 0))
                     throw ConfigError("morse: C_A, ell_A, C_R, ell_R must be positive");
                 },
                 [](const QuasiMorse& q) {
                   if (!(q.C > 0 && q.l > 0 && q.p > 0))
                     throw ConfigError("quasi_morse: C, l, p must be positive");
                 },
                 [](const PowerLaw& w) {
                   if (!(w.a > w.b && w.b > 0))
                     throw ConfigError("power_law: exponents must satisfy a > b > 0");
                 },
                 [](const NoInteraction&) {},
             },
             pot);
}

std::string family_name(const RadialPotential& pot)
{
  return std::visit(overloaded{
                        [](const Morse&) { return std::string("morse"); },
                        [](const QuasiMorse&) { return std::string("quasi_morse"); },
                        [](const PowerLaw&) { return std::string("power_law"); },
                        [](const NoInteraction&) { return std::string("none"); },
                    },
                    pot);
}

bool singular_at_origin(const RadialPotential& pot)
{
  return std::visit(overloaded{
                        [](const Morse&) { return false; },
                        [](const QuasiMorse& q) { return q.p < 1.0; },
                        [](const PowerLaw& w) { return w.b < 1.0; },
                        [](const NoInteraction&) { return false; },
                    },
                    pot);
}

double potential_value(const RadialPotential& pot, double r)
{
  require_nonneg(r, "potential_value");
  const double u = std::visit([r](const auto& f) { return kernel::value(f, r); }, pot);
  return checked(u, r, "potential_value");
}

double potential_deriv(const RadialPotential& pot, double r)
{
  require_nonneg(r, "potential_deriv");
  const double u = std::visit([r](const auto& f) { return kernel::deriv(f, r); }, pot);
  return checked(u, r, "potential_deriv");
}

double potential_second_deriv(const RadialPotential& pot, double r)
{
  require_nonneg(r, "potential_second_deriv");
  const double u = std::visit([r](const auto& f) { return kernel::second_deriv(f, r); }, pot);
  return checked(u, r, "potential_second_deriv");
}

double deriv_over_r(const RadialPotential& pot, double r)
{
  return std::visit(overloaded{
                        [r](const Morse& m) { return kernel::deriv(m, r) / r; },
                        [r](const QuasiMorse& q) {
                          // r^{p-1} e^{-r^p/p} / r with one pow per term
                          const double rl = r / q.l;
                          const double a = std::pow(r, q.p);
                          const double b = std::pow(rl, q.p);
                          return (a * std::exp(-a / q.p) - q.C * b * std::exp(-b / q.p)) / (r * r);
                        },
                        [r](const PowerLaw& w) { return (std::pow(r, w.a) - std::pow(r, w.b)) / (r * r); },
                        [](const NoInteraction&) { return 0.0; },
                    },
                    pot);
}

Vec2 pair_gradient(const RadialPotential& pot, const Vec2& d, double guard)
{
  const double r = d.norm();
  if (r < guard) {
    if (singular_at_origin(pot) || potential_deriv(pot, 0.0) != 0.0) throw CollisionError(0, 1, r);
    return Vec2::Zero();
  }
  return potential_deriv(pot, r) / r * d;
}

Mat2 hessian_W(const RadialPotential& pot, const Vec2& d, double guard)
{
  const double r = d.norm();
  if (r < guard) {
    throw SingularityError("hessian_W: separation below guard radius");
  }
  const Vec2 e = d / r;
  const Mat2 P = e * e.transpose();
  return potential_second_deriv(pot, r) * P + potential_deriv(pot, r) / r * (Mat2::Identity() - P);
}

}  // namespace swarm
