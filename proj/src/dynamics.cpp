#include "swarm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swarm {

Points ControlLaw::operator()(double t, const SwarmState& s, const RadialPotential& pot) const
{
  const Points F = interaction_forces(pot, s.x);
  return eval(ControlInput{t, s, F});
}

ControlLaw zero_control()
{
  return {"zero", [](const ControlInput& in) { return Points::Zero(2, in.state.size()).eval(); }};
}

void SimConfig::validate(double t_start) const
{
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(t_end - t_start >= dt * (1.0 - 1e-12))) throw ConfigError("t_end must be at least one step past the start");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!(guard >= 0.0)) throw ConfigError("guard must be >= 0");
}

OrderParameters order_parameters(const SwarmState& s)
{
  OrderParameters op;
  const Eigen::Index n = s.size();
  if (n == 0) return op;
  const Vec2 xm = s.x.rowwise().mean();
  double speed_sum = 0.0, radius_sum = 0.0, lever_sum = 0.0, am = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 r = s.x.col(i) - xm;
    const double sp = s.v.col(i).norm();
    speed_sum += sp;
    radius_sum += r.norm();
    lever_sum += r.norm() * sp;
    am += perp(r).dot(s.v.col(i));
  }
  const double vs = s.v.rowwise().sum().norm();
  op.polarization = speed_sum > 0 ? vs / speed_sum : 0.0;
  op.ang_momentum = lever_sum > 0 ? std::abs(am) / lever_sum : 0.0;
  op.mean_radius = radius_sum / static_cast<double>(n);
  op.mean_speed = speed_sum / static_cast<double>(n);
  return op;
}

void Trajectory::append(Trajectory&& next)
{
  std::size_t skip = 0;
  if (!times.empty() && !next.times.empty() && next.times.front() == times.back()) skip = 1;
  auto move_from = [skip](auto& dst, auto& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin() + static_cast<std::ptrdiff_t>(std::min(skip, src.size()))),
               std::make_move_iterator(src.end()));
  };
  move_from(times, next.times);
  move_from(states, next.states);
  move_from(controls, next.controls);
  move_from(energy, next.energy);
  move_from(order, next.order);
  move_from(max_control, next.max_control);
  step_times.insert(step_times.end(), next.step_times.begin(), next.step_times.end());
  step_u_max.insert(step_u_max.end(), next.step_u_max.begin(), next.step_u_max.end());
  step_u_request.insert(step_u_request.end(), next.step_u_request.begin(), next.step_u_request.end());
  phases.insert(phases.end(), next.phases.begin(), next.phases.end());
  warnings.insert(warnings.end(), next.warnings.begin(), next.warnings.end());
  stopped_early = next.stopped_early;
}

namespace {

Derivative rhs_with_forces(const SwarmState& s, const ModelParams& params, const Points& F, const Points& u)
{
  Derivative d;
  d.dx = s.v;
  const Eigen::RowVectorXd gain = params.alpha - params.beta * s.v.colwise().squaredNorm().array();
  d.dv = s.v.array().rowwise() * gain.array();
  d.dv += u - F;
  return d;
}

SwarmState advance(const SwarmState& s, const Derivative& d, double h)
{
  return SwarmState(s.t + h, s.x + h * d.dx, s.v + h * d.dv);
}

}  // namespace

Derivative rhs(const SwarmState& state, const RadialPotential& pot, const ModelParams& params, const Points& u,
               double guard)
{
  if (u.cols() != state.size()) throw DomainError("rhs: control size does not match agent count");
  return rhs_with_forces(state, params, interaction_forces(pot, state.x, guard), u);
}

Points saturate(const Points& u, double M)
{
  Points out = u;
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    const double n = u.col(i).norm();
    if (n > M) out.col(i) *= M / n;
  }
  return out;
}

double max_norm(const Points& u)
{
  return u.cols() == 0 ? 0.0 : u.colwise().norm().maxCoeff();
}

SwarmState step(const SwarmState& s, const RadialPotential& pot, const ModelParams& params, const ControlLaw& law,
                double dt, double guard, StepInfo* info)
{
  auto stage = [&](const SwarmState& y, bool first) {
    const Points F = interaction_forces(pot, y.x, guard);
    const Points req = law(ControlInput{y.t, y, F});
    if (req.cols() != y.size()) throw DomainError("control law '" + law.name + "' returned wrong agent count");
    const Points u = saturate(req, params.M);
    if (first && info) {
      info->u_request = req;
      info->u_applied = u;
      info->forces = F;
    }
    return rhs_with_forces(y, params, F, u);
  };
  const Derivative k1 = stage(s, true);
  const Derivative k2 = stage(advance(s, k1, dt / 2), false);
  const Derivative k3 = stage(advance(s, k2, dt / 2), false);
  const Derivative k4 = stage(advance(s, k3, dt), false);
  SwarmState out(s.t + dt, s.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
                 s.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv));
  return out;
}

Trajectory simulate(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                    const ControlLaw& law, const SimConfig& config, const StopCondition& stop)
{
  config.validate(init.t);
  if (!init.finite()) throw NonFiniteError(init.t, "initial state");
  if (init.v.cols() != init.size()) throw DomainError("simulate: x and v sizes differ");

  Trajectory traj;
  const double t0 = init.t;
  const double span = config.t_end - t0;
  const auto n_steps = static_cast<long long>(std::ceil(span / config.dt - 1e-9));

  auto record = [&](const SwarmState& s, const Points& u) {
    traj.times.push_back(s.t);
    traj.states.push_back(s);
    traj.controls.push_back(u);
    traj.energy.push_back(total_energy(s, pot, config.guard));
    traj.order.push_back(order_parameters(s));
    traj.max_control.push_back(max_norm(u));
  };
  auto with_time = [](const CollisionError& e, double t) { return CollisionError(e.first, e.second, e.distance, t); };

  SwarmState cur = init;
  try {
    for (long long k = 0;; ++k) {
      StepInfo info;
      const bool last = k == n_steps;
      const double t_next = (k + 1 == n_steps) ? config.t_end : t0 + static_cast<double>(k + 1) * config.dt;
      const double h = t_next - cur.t;
      bool halt = last;
      if (!last && stop) {
        const Points F = interaction_forces(pot, cur.x, config.guard);
        halt = stop(cur, F);
        if (halt) traj.stopped_early = true;
      }
      if (halt) {
        const Points F = interaction_forces(pot, cur.x, config.guard);
        record(cur, saturate(law(ControlInput{cur.t, cur, F}), params.M));
        break;
      }
      SwarmState nxt = step(cur, pot, params, law, h, config.guard, &info);
      if (k % config.record_every == 0) record(cur, info.u_applied);
      traj.step_times.push_back(cur.t);
      traj.step_u_max.push_back(max_norm(info.u_applied));
      traj.step_u_request.push_back(max_norm(info.u_request));
      if (!nxt.finite()) throw NonFiniteError(nxt.t, "simulate (" + law.name + ")");
      nxt.t = t_next;
      cur = std::move(nxt);
    }
  } catch (const CollisionError& e) {
    throw with_time(e, cur.t);
  }
  return traj;
}

}  // namespace swarm
