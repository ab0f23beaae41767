#include "support.hpp"

#include "swarm/controllers.hpp"
#include "swarm/dynamics.hpp"
#include "swarm/model.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace swarm;

namespace {

// Exact speed of v' = (alpha - beta |v|^2) v from |v(0)| = s0.
double logistic_speed(double alpha, double beta, double s0, double t)
{
  return std::sqrt(alpha / (beta + (alpha / (s0 * s0) - beta) * std::exp(-2 * alpha * t)));
}

}  // namespace

TEST_CASE("saturation is a radial projection onto the M-disk")
{
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Points u = test::random_points(rng, 12, 5.0);
    const double M = rng.uniform(0.1, 4.0);
    const Points s = saturate(u, M);
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      const double n = u.col(i).norm();
      CHECK(s.col(i).norm() <= M * (1 + 1e-15));
      if (n <= M)
        CHECK(s.col(i) == u.col(i));
      else {
        CHECK(std::abs(cross(s.col(i), u.col(i))) < 1e-12 * n * M);
        CHECK(s.col(i).dot(u.col(i)) > 0);
      }
    }
    CHECK(max_norm(s) <= M * (1 + 1e-15));
  }
}

TEST_CASE("the control is re-evaluated at every Runge-Kutta stage")
{
  auto calls = std::make_shared<int>(0);
  ControlLaw counting{"count", [calls](const ControlInput& in) {
                        ++*calls;
                        return Points(Points::Zero(2, in.state.size()));
                      }};
  SwarmState s(3);
  s.x << 0, 1, 2, 0, 0, 1;
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.record_every = 1000;
  simulate(s, PowerLaw{4, 1}, ModelParams{1, 1, 1, 3}, counting, cfg);
  // four stages per step plus the control recorded with the final state
  CHECK(*calls == 41);
}

TEST_CASE("RK4 is fourth order on the free speed equation")
{
  const ModelParams params{2.0, 1.5, 1.0, 1};
  SwarmState s(1);
  s.v.col(0) = Vec2(0.3, 0.1);
  const double s0 = s.v.col(0).norm();
  double errs[2];
  int k = 0;
  for (double dt : {0.1, 0.05}) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 2.0;
    const Trajectory tr = simulate(s, NoInteraction{}, params, zero_control(), cfg);
    errs[k++] = std::abs(tr.final_state().v.col(0).norm() - logistic_speed(2.0, 1.5, s0, 2.0));
  }
  const double order = std::log2(errs[0] / errs[1]);
  CHECK(order > 3.7);
  CHECK(order < 4.3);
}

TEST_CASE("recording schedule, stop condition and saturation log")
{
  SplitMix64 rng(4);
  SwarmState s(5);
  s.x = test::random_points(rng, 5, 2.0);
  const ModelParams params{2.0, 1.5, 0.5, 5};
  ControlLaw big{"big", [](const ControlInput& in) { return Points(Points::Constant(2, in.state.size(), 3.0)); }};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.record_every = 7;
  const Trajectory tr = simulate(s, QuasiMorse{0.6, 0.5, 1.5}, params, big, cfg);
  CHECK(tr.step_times.size() == 100);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  CHECK(tr.times.size() == 100 / 7 + 2);
  for (std::size_t k = 0; k < tr.step_u_max.size(); ++k) {
    CHECK(tr.step_u_max[k] <= params.M + 1e-12);
    CHECK(tr.step_u_request[k] == doctest::Approx(std::sqrt(18.0)));
  }

  const Trajectory early = simulate(s, QuasiMorse{0.6, 0.5, 1.5}, params, big, cfg,
                                    [](const SwarmState& st, const Points&) { return st.t >= 0.25 - 1e-12; });
  CHECK(early.stopped_early);
  CHECK(early.final_state().t == doctest::Approx(0.25));
}

TEST_CASE("identical inputs give bit-identical trajectories")
{
  RandomInit spec;
  spec.N = 40;
  spec.speed_disk = 1.0;
  spec.seed = 99;
  const SwarmState s = random_state(spec);
  const ModelParams params{2.0, 1.5, 2.0, 40};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  cfg.record_every = 1;
  const ControlLaw law = jq_feedback(params, {1.5});
  const Trajectory a = simulate(s, QuasiMorse{0.6, 0.5, 1.5}, params, law, cfg);
  const Trajectory b = simulate(s, QuasiMorse{0.6, 0.5, 1.5}, params, law, cfg);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k].x == b.states[k].x);
    CHECK(a.states[k].v == b.states[k].v);
    CHECK(a.energy[k] == b.energy[k]);
  }
}

TEST_CASE("singular collisions raise")
{
  SwarmState s(2);
  s.x << -0.5, 0.5, 0, 0;
  s.v << 5, -5, 0, 0;
  const ModelParams params{0.0, 1.0, 1.0, 2};
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 1.0;
  cfg.guard = 0.2;
  CHECK_THROWS_AS(simulate(s, PowerLaw{0.5, 0.25}, params, zero_control(), cfg), CollisionError);
}

TEST_CASE("order parameters of aligned and rotating swarms")
{
  SwarmState s(4);
  s.x << 1, 0, -1, 0, 0, 1, 0, -1;
  s.v.colwise() = Vec2(0.0, 2.0);
  OrderParameters op = order_parameters(s);
  CHECK(op.polarization == doctest::Approx(1.0));
  CHECK(op.mean_radius == doctest::Approx(1.0));
  CHECK(op.mean_speed == doctest::Approx(2.0));
  for (int i = 0; i < 4; ++i) s.v.col(i) = perp(Vec2(s.x.col(i)));
  op = order_parameters(s);
  CHECK(op.polarization == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(op.ang_momentum == doctest::Approx(1.0));
  CHECK(order_parameters(SwarmState(3)).polarization == 0.0);
}

TEST_CASE("append drops the repeated junction sample")
{
  SwarmState s(2);
  s.x << 0, 1.5, 0, 0;
  const ModelParams params{1.0, 1.0, 1.0, 2};
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.record_every = 1;
  Trajectory a = simulate(s, PowerLaw{4, 1}, params, zero_control(), cfg);
  cfg.t_end = 2.0;
  Trajectory b = simulate(a.final_state(), PowerLaw{4, 1}, params, zero_control(), cfg);
  const std::size_t na = a.times.size(), nb = b.times.size();
  a.append(std::move(b));
  CHECK(a.times.size() == na + nb - 1);
  for (std::size_t k = 1; k < a.times.size(); ++k) CHECK(a.times[k] > a.times[k - 1]);
}
