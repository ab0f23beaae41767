#include "support.hpp"

#include "swarm/potential.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <cmath>

using namespace swarm;
namespace mp = boost::multiprecision;
using Big = mp::number<mp::cpp_bin_float<60>, mp::et_off>;

namespace {

// Fourth-order central difference in 60-digit arithmetic.
template <typename Family>
double big_derivative(const Family& f, double r, int order)
{
  const Big h("1e-12");
  const Big x(r);
  auto U = [&](const Big& y) { return kernel::value<Big>(f, y); };
  if (order == 1) return static_cast<double>((U(x - 2 * h) - 8 * U(x - h) + 8 * U(x + h) - U(x + 2 * h)) / (12 * h));
  return static_cast<double>((-U(x - 2 * h) + 16 * U(x - h) - 30 * U(x) + 16 * U(x + h) - U(x + 2 * h)) / (12 * h * h));
}

template <typename Family>
void check_family(const Family& f, const RadialPotential& pot)
{
  for (double r : {0.07, 0.3, 0.9, 1.0, 1.7, 3.2, 6.5}) {
    CAPTURE(r);
    const double d1 = big_derivative(f, r, 1);
    const double d2 = big_derivative(f, r, 2);
    CHECK(potential_deriv(pot, r) == doctest::Approx(d1).epsilon(1e-12));
    CHECK(potential_second_deriv(pot, r) == doctest::Approx(d2).epsilon(1e-10));
  }
}

}  // namespace

TEST_CASE("kernel derivatives agree with high-precision differences")
{
  const Morse m{1.0, 2.0, 1.5, 0.5};
  check_family(m, RadialPotential{m});
  const QuasiMorse q{0.6, 0.5, 1.5};
  check_family(q, RadialPotential{q});
  const PowerLaw w{4.0, 1.0};
  check_family(w, RadialPotential{w});
  const PowerLaw s{0.5, 0.25};
  check_family(s, RadialPotential{s});
}

TEST_CASE("Morse value matches its closed form")
{
  const RadialPotential pot = Morse{1.0, 2.0, 1.5, 0.5};
  for (double r : {0.0, 0.5, 2.0}) CHECK(potential_value(pot, r) == doctest::Approx(-std::exp(-r / 2) + 1.5 * std::exp(-r / 0.5)));
}

TEST_CASE("power law at the origin")
{
  const RadialPotential smooth = PowerLaw{4.0, 2.0};
  const RadialPotential singular = PowerLaw{0.5, 0.25};
  CHECK_FALSE(singular_at_origin(smooth));
  CHECK(singular_at_origin(singular));
  CHECK(potential_deriv(smooth, 0.0) == 0.0);
  CHECK_THROWS_AS(potential_deriv(singular, 0.0), SingularityError);
  CHECK_THROWS_AS(pair_gradient(singular, Vec2::Zero()), CollisionError);
  CHECK(pair_gradient(smooth, Vec2::Zero()).norm() == 0.0);
  CHECK_THROWS_AS(pair_gradient(PowerLaw{4.0, 1.0}, Vec2::Zero()), CollisionError);
  CHECK_THROWS_AS(potential_value(smooth, -1.0), DomainError);
}

TEST_CASE("family validation")
{
  CHECK_THROWS_AS(validate(PowerLaw{1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(validate(PowerLaw{1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate(Morse{-1.0, 1.0, 1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate(QuasiMorse{0.5, 0.0, 1.0}), ConfigError);
  CHECK_NOTHROW(validate(QuasiMorse{0.6, 0.5, 1.5}));
  CHECK(family_name(PowerLaw{}) == "power_law");
}

TEST_CASE("gradient is radial and odd, Hessian is even and symmetric")
{
  SplitMix64 rng(3);
  const RadialPotential pot = QuasiMorse{0.6, 0.5, 1.5};
  for (int k = 0; k < 50; ++k) {
    const Vec2 d = test::random_vec(rng, 0.1, 4.0);
    const Vec2 g = pair_gradient(pot, d);
    CHECK(std::abs(cross(g, d)) < 1e-13 * (1 + g.norm() * d.norm()));
    CHECK((pair_gradient(pot, -d) + g).norm() < 1e-15);
    const Mat2 H = hessian_W(pot, d);
    CHECK((H - H.transpose()).norm() == 0.0);
    CHECK((hessian_W(pot, -d) - H).norm() < 1e-14);
    CHECK(deriv_over_r(pot, d.norm()) * d.norm() == doctest::Approx(potential_deriv(pot, d.norm())));
  }
}

TEST_CASE("pair gradient examples")
{
  const RadialPotential pot = PowerLaw{4.0, 1.0};
  CHECK(pair_gradient(pot, Vec2(1, 0)).norm() == 0.0);
  CHECK((pair_gradient(pot, Vec2(2, 0)) - Vec2(potential_deriv(pot, 2.0), 0)).norm() < 1e-15);
  CHECK(potential_deriv(pot, 2.0) == 7.0);
}

TEST_CASE("pair gradient is rotation equivariant")
{
  SplitMix64 rng(4);
  const RadialPotential pot = Morse{1.0, 2.0, 1.5, 0.5};
  for (int k = 0; k < 100; ++k) {
    const Vec2 d = test::random_vec(rng, 0.05, 5.0);
    const Mat2 R = rotation(rng.uniform(0.0, 6.283185307179586));
    CHECK((pair_gradient(pot, R * d) - R * pair_gradient(pot, d)).norm() < 1e-12);
  }
}
