#include "support.hpp"

#include "swarm/dynamics.hpp"
#include "swarm/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace swarm;

TEST_CASE("pair forces cancel and follow the 1/N scaling")
{
  SplitMix64 rng(5);
  const RadialPotential pot = Morse{1.0, 2.0, 1.5, 0.5};
  const Points x = test::random_points(rng, 30, 3.0);
  const Points F = interaction_forces(pot, x);
  CHECK(F.rowwise().sum().norm() < 30 * 30 * 1e-13);
  const Points shifted = x.colwise() + Vec2(0.25, -3.0);
  CHECK((interaction_forces(pot, shifted) - F).cwiseAbs().maxCoeff() < 1e-12);

  Points two(2, 2);
  two << 0.0, 1.2, 0.0, -0.4;
  const Points F2 = interaction_forces(pot, two);
  const Vec2 g = pair_gradient(pot, two.col(0) - two.col(1));
  CHECK((F2.col(0) - g / 2).norm() < 1e-15);
  CHECK((F2.col(1) + g / 2).norm() < 1e-15);
}

TEST_CASE("forces are the gradient of the pair energy")
{
  SplitMix64 rng(6);
  const RadialPotential pot = QuasiMorse{0.6, 0.5, 1.5};
  const Eigen::Index n = 7;
  SwarmState s(n);
  s.x = test::random_points(rng, n, 1.5);
  auto pair_energy = [&](const Eigen::VectorXd& flat) {
    SwarmState y(n);
    y.x = Eigen::Map<const Points>(flat.data(), 2, n);
    return Eigen::VectorXd::Constant(1, total_energy(y, pot));
  };
  const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(s.x.data(), 2 * n);
  const Eigen::MatrixXd J = test::fd_jacobian(pair_energy, flat, 1e-6);
  const Points F = interaction_forces(pot, s.x);
  // V contains the pair sum once per ordered pair, so dV/dx_i = F_i.
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK(J(0, 2 * i) == doctest::Approx(F(0, i)).epsilon(1e-6));
    CHECK(J(0, 2 * i + 1) == doctest::Approx(F(1, i)).epsilon(1e-6));
  }
}

TEST_CASE("energy rate matches the derivative of the energy along the flow")
{
  SplitMix64 rng(8);
  const RadialPotential pot = PowerLaw{4.0, 1.0};
  const ModelParams params{2.0, 1.5, 2.0, 6};
  SwarmState s(6);
  s.x = test::random_points(rng, 6, 1.0);
  s.v = test::random_points(rng, 6, 1.0);
  const Points u = test::random_points(rng, 6, 0.5);
  const Derivative d = rhs(s, pot, params, u);
  const double h = 1e-6;
  SwarmState p = s, m = s;
  p.x += h * d.dx;
  p.v += h * d.dv;
  m.x -= h * d.dx;
  m.v -= h * d.dv;
  const double fd = (total_energy(p, pot) - total_energy(m, pot)) / (2 * h);
  CHECK(energy_rate(s, params, u) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("propulsion threshold is the maximum of the cubic")
{
  const ModelParams params{2.0, 1.5, 1.0, 2};
  double best = 0.0;
  for (int k = 0; k <= 200000; ++k) {
    const double s = 3.0 * k / 200000;
    best = std::max(best, params.alpha * s - params.beta * s * s * s);
  }
  CHECK(threshold_M_alpha_beta(params) == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("force bounds against a dense grid")
{
  const RadialPotential morse = Morse{1.0, 2.0, 1.5, 0.5};
  const ForceBounds fb = force_bounds(morse, 1.0, 8);
  double sup_abs = 0.0, sup = -1e300;
  for (int k = 0; k <= 400000; ++k) {
    const double r = 20.0 * k / 400000;
    const double d = potential_deriv(morse, r);
    sup_abs = std::max(sup_abs, std::abs(d));
    sup = std::max(sup, d);
  }
  CHECK(fb.M_F == doctest::Approx(sup_abs).epsilon(1e-8));
  CHECK(fb.tilde_M_F == doctest::Approx(sup).epsilon(1e-8));

  const ForceBounds grow = force_bounds(PowerLaw{4.0, 1.0}, 1.0, 8);
  CHECK(is_unbounded(grow.M_F));
  CHECK(is_unbounded(grow.tilde_M_F));

  const ForceBounds sing = force_bounds(PowerLaw{0.5, 0.25}, 1.0, 5);
  CHECK(is_unbounded(sing.M_F));
  CHECK_FALSE(is_unbounded(sing.tilde_M_F));
}

TEST_CASE("decay radius leaves the derivative below eta")
{
  const RadialPotential pot = PowerLaw{0.5, 0.25};
  const double R0 = decay_radius(pot, 0.2);
  REQUIRE_FALSE(is_unbounded(R0));
  for (double r = R0; r < 1e5; r *= 1.01) CHECK(std::abs(potential_deriv(pot, r)) < 0.2);
  CHECK(std::abs(potential_deriv(pot, 0.5 * R0)) >= 0.2 - 1e-12);
}

TEST_CASE("gradient Lipschitz bound dominates observed difference quotients")
{
  SplitMix64 rng(9);
  const RadialPotential pot = QuasiMorse{0.6, 0.5, 1.5};
  const double L = gradient_lipschitz_bound(pot, 0.05, 50.0);
  for (int k = 0; k < 500; ++k) {
    const Vec2 a = test::random_vec(rng, 0.05, 5.0);
    const Vec2 b = a + test::random_vec(rng, 1e-4, 1e-2);
    if (b.norm() < 0.05) continue;
    CHECK((pair_gradient(pot, a) - pair_gradient(pot, b)).norm() <= L * (a - b).norm() * (1 + 1e-9));
  }
}
