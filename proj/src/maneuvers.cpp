#include "swarm/maneuvers.hpp"

#include "swarm/random.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <memory>
#include <set>

namespace swarm {

namespace {

constexpr double kPi = std::numbers::pi;

double max_col_norm(const Points& p)
{
  return p.cols() == 0 ? 0.0 : p.colwise().norm().maxCoeff();
}

double min_pair_distance(const Points& x)
{
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    for (Eigen::Index j = i + 1; j < x.cols(); ++j) best = std::min(best, (x.col(i) - x.col(j)).norm());
  return best;
}

double diameter(const Points& x)
{
  double best = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    for (Eigen::Index j = i + 1; j < x.cols(); ++j) best = std::max(best, (x.col(i) - x.col(j)).norm());
  return best;
}

double choose_gamma(const ModelParams& params, const PipelineOptions& opts)
{
  return opts.gamma > 0 ? opts.gamma : 1.1 * jq_gamma_lower_bound(params);
}

TrackingReference static_reference(const Points& x)
{
  return {x, Points::Zero(2, x.cols()), Points::Zero(2, x.cols())};
}

LawFactory hold_in_place(const ModelParams& params, const PipelineOptions& opts)
{
  return [params, opts](const SwarmState& start) {
    const TrackingReference ref = static_reference(start.x);
    return pd_tracking(params, [ref](double) { return ref; }, opts.k1, opts.k2);
  };
}

PhaseSpec final_phase(std::string name, LawFactory law, const PipelineOptions& opts)
{
  PhaseSpec p;
  p.name = std::move(name);
  p.law = std::move(law);
  p.until_horizon = true;
  p.min_duration = opts.min_hold;
  p.require_predicate = false;
  return p;
}

void check_budget(Trajectory& traj, const RadialPotential& pot, const ModelParams& params, bool need_force_bound)
{
  if (params.M <= threshold_M_alpha_beta(params))
    traj.warnings.push_back("M does not exceed M_{alpha,beta}; JQ stabilization is not guaranteed");
  if (need_force_bound) {
    const double MF = force_bounds(pot, 1.0, params.N).M_F;
    if (!(params.M > MF))
      traj.warnings.push_back("M does not exceed the interaction bound M_F; the hold phase may saturate");
  }
}

bool is_flock(const SwarmState& s, const Points& F, const ModelParams& params, double eps)
{
  const double speed = params.cruise_speed();
  const auto sp = s.v.colwise().norm();
  return order_parameters(s).polarization >= 0.999 && (sp.array() - speed).abs().maxCoeff() < 1e-3 &&
         max_col_norm(F) < eps;
}

// Agents sorted by angle about `center`, then the cyclic shift onto the
// slots at angles 2 pi k/N with the least total squared displacement.
std::vector<Eigen::Index> ring_assignment(const Points& x, const std::vector<Eigen::Index>& agents,
                                          const Vec2& center, double R)
{
  std::vector<Eigen::Index> by_angle = agents;
  auto ang = [&](Eigen::Index i) {
    const Vec2 d = x.col(i) - center;
    return std::atan2(d.y(), d.x());
  };
  std::sort(by_angle.begin(), by_angle.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ta = ang(a), tb = ang(b);
    return ta != tb ? ta < tb : a < b;
  });
  const int n = static_cast<int>(agents.size());
  const Points slots = ring_positions(RingSpec::flock(n, R, center));
  int best_shift = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int shift = 0; shift < n; ++shift) {
    double cost = 0.0;
    for (int k = 0; k < n; ++k) cost += (x.col(by_angle[static_cast<std::size_t>((k + shift) % n)]) - slots.col(k)).squaredNorm();
    if (cost < best - 1e-12) {
      best = cost;
      best_shift = shift;
    }
  }
  std::vector<Eigen::Index> slot_owner(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) slot_owner[static_cast<std::size_t>(k)] = by_angle[static_cast<std::size_t>((k + best_shift) % n)];
  return slot_owner;
}

}  // namespace

// ---------------------------------------------------------------- plans

void PhasePlan::validate() const
{
  if (phases.empty()) throw ConfigError("phase plan is empty");
  for (const auto& p : phases) {
    if (p.name.empty()) throw ConfigError("phase without a name");
    if (p.skip) continue;
    if (!p.law) throw ConfigError("phase '" + p.name + "' has no law");
    if (!p.until_horizon && !(p.max_duration > 0)) throw ConfigError("phase '" + p.name + "' needs max_duration > 0");
    if (p.min_duration < 0) throw ConfigError("phase '" + p.name + "' has a negative min_duration");
  }
}

Trajectory run_plan(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                    const PhasePlan& plan, const SimConfig& sim)
{
  plan.validate();
  Trajectory out;
  SwarmState cur = init;
  for (const PhaseSpec& ph : plan.phases) {
    if (ph.skip) {
      out.phases.push_back({ph.name, cur.t, cur.t, "skipped", false});
      continue;
    }
    const double dur = ph.until_horizon ? std::max(sim.t_end - cur.t, ph.min_duration) : ph.max_duration;
    SimConfig cfg = sim;
    cfg.t_end = cur.t + dur;
    const ControlLaw law = ph.law(cur);

    bool met = false;
    StopCondition stop;
    if (ph.stop) {
      stop = [&](const SwarmState& s, const Points& F) {
        if (ph.stop(s, F)) met = true;
        return met;
      };
    }
    Trajectory tr = simulate(cur, pot, params, law, cfg, stop);
    if (ph.stop && !met) met = ph.stop(tr.final_state(), interaction_forces(pot, tr.final_state().x, sim.guard));

    PhaseRecord rec{ph.name, cur.t, tr.final_state().t, met ? "predicate" : "horizon", met || !ph.stop};
    if (ph.stop && !met && ph.require_predicate) throw PhaseTimeoutError(ph.name, ph.predicate, rec.t_end);
    tr.phases.push_back(rec);
    tr.stopped_early = false;
    out.append(std::move(tr));
    cur = out.final_state();
  }
  return out;
}

double stabilization_threshold(const RadialPotential& pot, const ModelParams& params, double eps)
{
  if (!(eps > 0)) throw ConfigError("stabilization threshold needs eps > 0");
  const double L = gradient_lipschitz_bound(pot);
  return std::min(eps / (1 + L / 2), params.M / (2 + params.alpha + L / 2));
}

namespace {

// Lipschitz constant over the distances a dissipative phase can reach from x.
double local_threshold(const RadialPotential& pot, const ModelParams& params, double eps, const Points& x)
{
  const double L = gradient_lipschitz_bound(pot, 0.05, std::max(4.0, 2.0 * diameter(x)));
  return std::min(eps / (1 + L / 2), params.M / (2 + params.alpha + L / 2));
}

// JQ until speeds and forces fall below eps', then braking to |v| <= eta dt.
void push_stabilization(PhasePlan& plan, const ModelParams& params, double eps_p,
                        const PipelineOptions& opts, bool skip)
{
  const double gamma = choose_gamma(params, opts);
  PhaseSpec jq;
  jq.name = "stabilize";
  jq.law = [params, gamma](const SwarmState&) { return jq_feedback(params, JQParams{gamma}); };
  jq.stop = [eps_p](const SwarmState& s, const Points& F) {
    return max_col_norm(s.v) < eps_p && max_col_norm(F) < eps_p;
  };
  jq.predicate = "max|v| < eps' and max|F| < eps'";
  jq.max_duration = opts.phase_cap;
  jq.skip = skip;
  plan.phases.push_back(jq);

  const double eta = eps_p / 2;
  const double dt = opts.sim.dt;
  PhaseSpec kill;
  kill.name = "brake";
  kill.law = [params, eta, dt](const SwarmState&) { return velocity_kill(params, eta, dt); };
  kill.stop = [eta, dt](const SwarmState& s, const Points&) { return max_col_norm(s.v) <= eta * dt; };
  kill.predicate = "max|v| <= eta dt";
  kill.max_duration = std::min(opts.phase_cap, 2 * eps_p / eta + 5.0);
  kill.skip = skip;
  plan.phases.push_back(kill);
}

}  // namespace

// ---------------------------------------------------------------- flocks

Trajectory flock_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                          const Vec2& target_vbar, double eps, const PipelineOptions& opts)
{
  params.validate();
  opts.sim.validate(init.t);
  const double s = params.cruise_speed();
  if (std::abs(target_vbar.norm() - s) > 1e-9 * std::max(1.0, s))
    throw ConfigError("flock pipeline: |target velocity| must equal the cruise speed");
  if (!(params.alpha > 0)) throw ConfigError("flock pipeline needs alpha > 0");
  if (params.M <= threshold_M_alpha_beta(params))
    throw ThresholdError("flock pipeline needs M > M_{alpha,beta}");

  const double eps_p = local_threshold(pot, params, eps, init.x);
  const Points F0 = interaction_forces(pot, init.x, opts.sim.guard);
  const bool flock = is_flock(init, F0, params, eps_p);
  const Vec2 heading = init.v.rowwise().mean();
  const bool aligned = flock && (heading.normalized() - target_vbar.normalized()).norm() < 1e-3;

  PhasePlan plan;
  push_stabilization(plan, params, eps_p, opts, flock);

  PhaseSpec inject;
  inject.name = "inject";
  inject.skip = flock;
  const Vec2 target = opts.nu * target_vbar;
  const double k2 = opts.k2;
  inject.law = [params, target, k2](const SwarmState&) {
    ControlLaw w{"velocity_pd", [target, k2](const ControlInput& in) {
                   return (-k2 * (in.state.v.colwise() - target)).eval();
                 }};
    return cancel_and_inject(params, std::move(w), params.M / 2);
  };
  inject.stop = [target](const SwarmState& st, const Points&) {
    return max_col_norm(st.v.colwise() - target) < 1e-9;
  };
  inject.predicate = "max|v - nu vbar| < 1e-9";
  inject.max_duration = opts.phase_cap;
  plan.phases.push_back(inject);

  if (flock && !aligned) {
    PhaseSpec turn;
    turn.name = "turn";
    const double th0 = std::atan2(heading.y(), heading.x());
    double dth = std::atan2(target_vbar.y(), target_vbar.x()) - th0;
    dth = std::remainder(dth, 2 * kPi);
    const double T = std::max(10.0, 50.0 * std::abs(dth));
    turn.law = [params, th0, dth, T, s](const SwarmState& start) {
      QuasiStaticPlan q{0.0, dth, T, s * Vec2(std::cos(th0), std::sin(th0)), start.t};
      return quasi_static_rotation(params.M, q);
    };
    turn.max_duration = T;
    plan.phases.push_back(turn);
  }

  plan.phases.push_back(final_phase("hold", [](const SwarmState&) { return flock_hold(); }, opts));

  Trajectory traj = run_plan(init, pot, params, plan, opts.sim);
  check_budget(traj, pot, params, false);
  return traj;
}

Trajectory flock_to_flock(const SwarmState& init_flock, const RadialPotential& pot, const ModelParams& params,
                          const QuasiStaticPlan& plan, const PipelineOptions& opts, double envelope)
{
  plan.validate(params);
  if (!(envelope > 0)) throw ConfigError("flock_to_flock needs a positive envelope");
  const Points rel0 = init_flock.x.colwise() - init_flock.x.rowwise().mean();

  PhasePlan pp;
  PhaseSpec turn;
  turn.name = "rotate";
  turn.law = [params, plan](const SwarmState& start) {
    QuasiStaticPlan q = plan;
    q.t0 = start.t;
    return quasi_static_rotation(params.M, q);
  };
  turn.stop = [rel0, envelope](const SwarmState& s, const Points&) {
    const Points rel = s.x.colwise() - s.x.rowwise().mean();
    const double err = max_col_norm(rel - rel0);
    if (err > envelope)
      throw TrackingError("flock_to_flock: relative positions drifted by " + std::to_string(err) + " at t = " +
                          std::to_string(s.t));
    return false;
  };
  turn.predicate = "tracking envelope";
  turn.max_duration = plan.T;
  turn.require_predicate = false;
  pp.phases.push_back(turn);
  pp.phases.push_back(final_phase("hold", [](const SwarmState&) { return flock_hold(); }, opts));
  return run_plan(init_flock, pot, params, pp, opts.sim);
}

Trajectory mill_to_flock(const SwarmState& init_mill, const RadialPotential& pot, const ModelParams& params,
                         const Vec2& vbar, double R_f, InstantaneousSpec spec, const PipelineOptions& opts)
{
  if (!(R_f > 0)) throw ConfigError("mill_to_flock needs R_f > 0");
  spec.v_bar = vbar;
  spec.validate();
  PhasePlan pp;
  PhaseSpec ctl;
  ctl.name = "instantaneous";
  ctl.law = [params, spec](const SwarmState&) { return instantaneous_flock_law(params, spec); };
  ctl.stop = [R_f](const SwarmState& s, const Points&) {
    const auto op = order_parameters(s);
    return op.polarization > 0.99 && std::abs(op.mean_radius - R_f) < 0.05 * R_f;
  };
  ctl.predicate = "polarization > 0.99 and mean radius within 5% of R_f";
  ctl.max_duration = opts.phase_cap;
  pp.phases.push_back(ctl);
  pp.phases.push_back(final_phase("hold", [](const SwarmState&) { return flock_hold(); }, opts));
  return run_plan(init_mill, pot, params, pp, opts.sim);
}

// ---------------------------------------------------------------- reference paths

Smoothstep smoothstep5(double tau)
{
  if (tau <= 0) return {0.0, 0.0, 0.0};
  if (tau >= 1) return {1.0, 0.0, 0.0};
  const double t2 = tau * tau, t3 = t2 * tau;
  return {t3 * (10 - 15 * tau + 6 * t2), 30 * t2 * (1 - 2 * tau + t2), 60 * tau * (1 - 3 * tau + 2 * t2)};
}

ReferencePath straight_move_path(const Points& start, const Points& end, double t0, double T)
{
  if (!(T > 0)) throw ConfigError("move duration must be positive");
  if (start.cols() != end.cols()) throw ConfigError("move endpoints differ in size");
  const Points delta = end - start;
  return [start, delta, t0, T](double t) {
    const Smoothstep s = smoothstep5((t - t0) / T);
    return TrackingReference{start + s.s * delta, (s.ds / T) * delta, (s.d2s / (T * T)) * delta};
  };
}

namespace {

// Duration that keeps a smoothstep move of length D below v_max.
double move_time(double D, double v_max)
{
  return std::max(1.0, 1.875 * D / v_max);
}

// Integral of the smoothstep from 0 to tau.
double smoothstep_integral(double tau)
{
  if (tau <= 0) return 0.0;
  if (tau >= 1) return 0.5 + (tau - 1);
  const double t4 = tau * tau * tau * tau;
  return t4 * (2.5 - 3 * tau + tau * tau);
}

}  // namespace

ReferencePath shrinking_ring_path(const SwarmState& start, const ModelParams& params, RingKind kind,
                                  const Vec2& center, double R_from, double R_to, double t0, double T,
                                  const Vec2& vbar, double speed_from, double speed_to)
{
  if (!(R_from > 0) || !(R_to > 0) || !(T > 0)) throw ConfigError("ring path needs positive radii and duration");
  const Eigen::Index n = start.size();
  const double s = params.cruise_speed();
  Eigen::VectorXd phi0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 d = start.x.col(i) - center;
    if (d.norm() < kGuardRadius) throw GeometryError("ring path: agent at the ring center");
    phi0(i) = std::atan2(d.y(), d.x());
  }
  auto radius = [=](double t) {
    const Smoothstep q = smoothstep5((t - t0) / T);
    return std::array<double, 3>{R_from + (R_to - R_from) * q.s, (R_to - R_from) * q.ds / T,
                                 (R_to - R_from) * q.d2s / (T * T)};
  };
  auto speed = [=](double t) {
    const Smoothstep q = smoothstep5((t - t0) / T);
    return std::array<double, 2>{speed_from + (speed_to - speed_from) * q.s, (speed_to - speed_from) * q.ds / T};
  };

  if (kind == RingKind::Flock) {
    const Vec2 dir = vbar.norm() > 0 ? Vec2(vbar.normalized()) : Vec2(1.0, 0.0);
    return [=](double t) {
      const auto [R, dR, d2R] = radius(t);
      const auto [g, dg] = speed(t);
      const double tau = (t - t0) / T;
      const double travel = speed_from * (t - t0) + (speed_to - speed_from) * T * smoothstep_integral(tau);
      TrackingReference ref{Points(2, n), Points(2, n), Points(2, n)};
      for (Eigen::Index i = 0; i < n; ++i) {
        const Vec2 e(std::cos(phi0(i)), std::sin(phi0(i)));
        ref.x.col(i) = center + s * travel * dir + R * e;
        ref.v.col(i) = s * g * dir + dR * e;
        ref.a.col(i) = s * dg * dir + d2R * e;
      }
      return ref;
    };
  }

  // orientation from the angular momentum of the start state
  double am = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) am += cross(start.x.col(i) - center, start.v.col(i));
  const double o = am < 0 ? -1.0 : 1.0;
  auto omega = [=](double t) {
    const auto [R, dR, d2R] = radius(t);
    (void)d2R;
    return o * s * speed(t)[0] / R;
  };
  return [=](double t) {
    const double theta = t <= t0 ? 0.0
                         : t <= t0 + T
                             ? boost::math::quadrature::gauss<double, 20>::integrate(omega, t0, t)
                             : boost::math::quadrature::gauss<double, 20>::integrate(omega, t0, t0 + T) +
                                   omega(t0 + T) * (t - t0 - T);
    const auto [R, dR, d2R] = radius(t);
    const auto [g, dg] = speed(t);
    const double w = o * s * g / R;
    const double dw = o * s * (dg * R - g * dR) / (R * R);
    TrackingReference ref{Points(2, n), Points(2, n), Points(2, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = phi0(i) + theta;
      const Vec2 er(std::cos(p), std::sin(p));
      const Vec2 et = perp(er);
      ref.x.col(i) = center + R * er;
      ref.v.col(i) = dR * er + R * w * et;
      ref.a.col(i) = (d2R - R * w * w) * er + (2 * dR * w + R * dw) * et;
    }
    return ref;
  };
}

// ---------------------------------------------------------------- mills

namespace {

// Centripetal hold with one ring per cluster.
ControlLaw cluster_centripetal(const std::vector<MillCluster>& clusters)
{
  return {"mill_centripetal", [clusters](const ControlInput& in) {
            Points u = in.forces;
            for (const auto& c : clusters) {
              for (Eigen::Index i : c.agents) {
                const Vec2 d = in.state.x.col(i) - c.center;
                const double n = d.norm();
                if (n < kGuardRadius) throw GeometryError("mill_centripetal: agent at the mill center");
                u.col(i) -= in.state.v.col(i).squaredNorm() / c.R * d / n;
              }
            }
            return u;
          }};
}

bool is_mill_at(const SwarmState& s, const ModelParams& params, const MillCluster& c)
{
  SwarmState sub(static_cast<Eigen::Index>(c.agents.size()));
  for (std::size_t k = 0; k < c.agents.size(); ++k) {
    sub.x.col(static_cast<Eigen::Index>(k)) = s.x.col(c.agents[k]);
    sub.v.col(static_cast<Eigen::Index>(k)) = s.v.col(c.agents[k]);
  }
  const Vec2 xm = sub.x.rowwise().mean();
  if ((xm - c.center).norm() > 1e-3) return false;
  if (order_parameters(sub).ang_momentum < 0.999) return false;
  const MillDiagnostics d = mill_diagnostics(sub, params, c.R);
  return d.radius_dev < 1e-3 && d.gamma_mean < 1e-3 && d.speed_dev < 1e-3;
}

}  // namespace

Trajectory mill_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                         const Vec2& center, double R_mill, double eps, const PipelineOptions& opts)
{
  MillCluster c;
  c.agents.resize(static_cast<std::size_t>(init.size()));
  std::iota(c.agents.begin(), c.agents.end(), Eigen::Index{0});
  c.center = center;
  c.R = R_mill;
  return mill_pipeline(init, pot, params, std::vector<MillCluster>{c}, eps, opts);
}

Trajectory mill_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                         const std::vector<MillCluster>& clusters, double eps, const PipelineOptions& opts)
{
  params.validate();
  opts.sim.validate(init.t);
  if (!(params.alpha > 0)) throw ConfigError("mill pipeline needs alpha > 0");
  if (params.M <= threshold_M_alpha_beta(params)) throw ThresholdError("mill pipeline needs M > M_{alpha,beta}");
  if (clusters.empty()) throw ConfigError("mill pipeline needs at least one cluster");
  std::set<Eigen::Index> seen;
  for (const auto& c : clusters) {
    if (!(c.R > 0)) throw ConfigError("mill radius must be positive");
    if (c.agents.size() < 2) throw ConfigError("each mill cluster needs at least two agents");
    for (Eigen::Index i : c.agents) {
      if (i < 0 || i >= init.size()) throw ConfigError("mill cluster agent index out of range");
      if (!seen.insert(i).second) throw ConfigError("agent assigned to two mill clusters");
    }
  }
  if (static_cast<Eigen::Index>(seen.size()) != init.size()) throw ConfigError("every agent must belong to a cluster");

  bool mill = true;
  for (const auto& c : clusters) mill = mill && is_mill_at(init, params, c);

  const double eps_p = local_threshold(pot, params, eps, init.x);
  PhasePlan plan;
  push_stabilization(plan, params, eps_p, opts, mill);

  // straight moves onto the ring slots, then a spin-up to nu times the cruise speed
  PhaseSpec place;
  place.name = "place";
  place.skip = mill;
  const double v_max = opts.v_max;
  const double k1 = opts.k1, k2 = opts.k2;
  auto targets = std::make_shared<Points>();
  auto duration = std::make_shared<double>(0.0);
  auto plan_targets = [clusters, targets, duration, v_max](const SwarmState& start) {
    *targets = start.x;
    for (const auto& c : clusters) {
      const auto owner = ring_assignment(start.x, c.agents, c.center, c.R);
      const Points slots = ring_positions(RingSpec::flock(static_cast<int>(owner.size()), c.R, c.center));
      for (std::size_t k = 0; k < owner.size(); ++k) targets->col(owner[k]) = slots.col(static_cast<Eigen::Index>(k));
    }
    *duration = move_time(max_col_norm(*targets - start.x), v_max);
  };
  if (!mill) plan_targets(init);  // only to size the phase cap
  place.law = [params, plan_targets, targets, duration, k1, k2](const SwarmState& start) {
    plan_targets(start);
    return pd_tracking(params, straight_move_path(start.x, *targets, start.t, *duration), k1, k2);
  };
  place.stop = [targets, duration](const SwarmState& s, const Points&) {
    return max_col_norm(s.x - *targets) < 1e-8 && max_col_norm(s.v) < 1e-8;
  };
  place.predicate = "agents on the ring slots";
  place.max_duration = *duration + opts.phase_cap;
  plan.phases.push_back(place);

  const double nu = opts.nu;
  PhaseSpec spin;
  spin.name = "spin_up";
  spin.skip = mill;
  const double T_spin = 10.0;
  spin.law = [params, clusters, nu, k1, k2, T_spin](const SwarmState& start) {
    std::vector<ReferencePath> paths;
    for (const auto& c : clusters) {
      SwarmState sub(static_cast<Eigen::Index>(c.agents.size()));
      for (std::size_t k = 0; k < c.agents.size(); ++k) {
        sub.x.col(static_cast<Eigen::Index>(k)) = start.x.col(c.agents[k]);
        sub.v.col(static_cast<Eigen::Index>(k)) = start.v.col(c.agents[k]);
      }
      paths.push_back(shrinking_ring_path(sub, params, RingKind::Mill, c.center, c.R, c.R, start.t, T_spin, Vec2::Zero(),
                                          0.0, nu));
    }
    const Eigen::Index n = start.size();
    ReferencePath all = [clusters, paths, n](double t) {
      TrackingReference ref{Points(2, n), Points(2, n), Points(2, n)};
      for (std::size_t c = 0; c < clusters.size(); ++c) {
        const TrackingReference r = paths[c](t);
        for (std::size_t k = 0; k < clusters[c].agents.size(); ++k) {
          const Eigen::Index i = clusters[c].agents[k];
          ref.x.col(i) = r.x.col(static_cast<Eigen::Index>(k));
          ref.v.col(i) = r.v.col(static_cast<Eigen::Index>(k));
          ref.a.col(i) = r.a.col(static_cast<Eigen::Index>(k));
        }
      }
      return ref;
    };
    return pd_tracking(params, all, k1, k2);
  };
  spin.max_duration = T_spin + 10.0;
  spin.require_predicate = false;
  plan.phases.push_back(spin);

  plan.phases.push_back(final_phase(
      "hold", [clusters](const SwarmState&) { return cluster_centripetal(clusters); }, opts));

  Trajectory traj = run_plan(init, pot, params, plan, opts.sim);
  check_budget(traj, pot, params, true);
  return traj;
}

// ---------------------------------------------------------------- blow-up

BlowupResult blowup_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params, double eta,
                             double L, const PipelineOptions& opts, const BlowupOptions& bopts)
{
  params.validate();
  if (!(L > 0)) throw ConfigError("blow-up needs L > 0");
  const Eigen::Index n = init.size();
  const double R0 = bopts.R0 > 0 ? bopts.R0 : decay_radius(pot, eta);
  if (is_unbounded(R0)) throw ConfigError("blow-up: |U'| never falls below eta");
  const RepulsiveSurrogate sur = build_repulsive_surrogate(pot, eta, R0);

  BlowupResult res;
  res.surrogate_deviation = surrogate_deviation(pot, sur.dU);

  PhasePlan plan;
  const double gamma = choose_gamma(params, opts);
  PhaseSpec jq;
  jq.name = "fictitious_jq";
  jq.law = [params, gamma, sur, g = opts.sim.guard](const SwarmState&) {
    return fictitious_potential_control(sur.dU, jq_feedback(params, JQParams{gamma}), g);
  };
  const double vt = bopts.jq_speed_tol, ft = bopts.jq_force_tol;
  jq.stop = [sur, vt, ft, g = opts.sim.guard](const SwarmState& s, const Points&) {
    return max_col_norm(s.v) < vt && max_col_norm(radial_forces(sur.dU, s.x, g)) < ft;
  };
  jq.predicate = "max|v| and max|F~| below tolerance";
  jq.max_duration = bopts.jq_cap;
  jq.require_predicate = false;
  plan.phases.push_back(jq);

  // Extractions start from rest so that only the moved agent changes position.
  const double brake = 0.1 * params.M;
  const double dt = opts.sim.dt;
  PhaseSpec settle;
  settle.name = "settle";
  settle.law = [params, brake, dt](const SwarmState&) { return velocity_kill(params, brake, dt); };
  settle.stop = [](const SwarmState& s, const Points&) { return max_col_norm(s.v) <= 1e-12; };
  settle.predicate = "max|v| <= 1e-12";
  settle.max_duration = opts.phase_cap;
  plan.phases.push_back(settle);
  Trajectory traj = run_plan(init, pot, params, plan, opts.sim);

  // Extraction targets shrink geometrically so that an agent moved later can
  // never come back within reach of one moved earlier.
  const double c = std::sin(kPi / static_cast<double>(n));
  const double rho = 1.0 + 1.0 / c + 0.1;
  const Eigen::Index m = n - 1;
  std::vector<Eigen::Index> remaining(static_cast<std::size_t>(n));
  std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});

  for (Eigen::Index k = 0; k < m; ++k) {
    const SwarmState cur = traj.final_state();
    Points sub(2, static_cast<Eigen::Index>(remaining.size()));
    for (std::size_t q = 0; q < remaining.size(); ++q) sub.col(static_cast<Eigen::Index>(q)) = cur.x.col(remaining[q]);
    const OuterVertex ov = outer_vertex(sub, opts.sim.guard);
    const Eigen::Index agent = remaining[static_cast<std::size_t>(ov.index)];
    const double target = L * std::pow(rho, static_cast<double>(m - 1 - k)) * (1 + 1e-3);

    auto gap = [&](double D) {
      const Vec2 p = cur.x.col(agent) + D * ov.bisector;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j : remaining)
        if (j != agent) best = std::min(best, (p - cur.x.col(j)).norm());
      return best - target;
    };
    double D = 0.0;
    if (gap(0.0) < 0) {
      double hi = 1.0;
      while (gap(hi) < 0) hi *= 2;
      boost::math::tools::eps_tolerance<double> tol(40);
      const auto br = boost::math::tools::bisect(gap, 0.0, hi, tol);
      D = br.second;
    }
    Points end = cur.x;
    end.col(agent) += D * ov.bisector;
    const double T = move_time(D, opts.v_max);

    PhasePlan step;
    PhaseSpec mv;
    mv.name = "extract_" + std::to_string(agent);
    mv.law = [params, end, T, k1 = opts.k1, k2 = opts.k2](const SwarmState& start) {
      return pd_tracking(params, straight_move_path(start.x, end, start.t, T), k1, k2);
    };
    mv.max_duration = T;
    step.phases.push_back(mv);
    traj.append(run_plan(cur, pot, params, step, opts.sim));

    res.order.push_back(agent);
    res.targets.push_back(target);
    remaining.erase(std::find(remaining.begin(), remaining.end(), agent));
  }

  PhasePlan hold;
  PhaseSpec h = final_phase("hold", hold_in_place(params, opts), opts);
  hold.phases.push_back(h);
  traj.append(run_plan(traj.final_state(), pot, params, hold, opts.sim));

  const double dmin = min_pair_distance(traj.final_state().x);
  if (!(dmin > L))
    traj.warnings.push_back("blow-up ended with min distance " + std::to_string(dmin) + " <= L");
  res.trajectory = std::move(traj);
  return res;
}

// ---------------------------------------------------------------- circular placement

Vec2 placement_center(const Points& x, std::uint64_t seed)
{
  const Eigen::Index n = x.cols();
  const Vec2 xm = x.rowwise().mean();
  const double scale = std::max(1.0, diameter(x));
  SplitMix64 rng(seed);
  auto clearance = [&](const Vec2& c) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      best = std::min(best, (c - x.col(i)).norm());
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Vec2 d = (x.col(j) - x.col(i)).normalized();
        best = std::min(best, std::abs(cross(d, c - x.col(i))));
      }
    }
    return best;
  };
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const Vec2 c = xm + 0.1 * scale * Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (clearance(c) > 1e-6 * scale) return c;
  }
  throw GeometryError("placement_center: no center off the pair lines");
}

double min_angular_separation(const Points& x, const Vec2& center)
{
  const Eigen::Index n = x.cols();
  std::vector<double> a(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 d = x.col(i) - center;
    a[static_cast<std::size_t>(i)] = std::atan2(d.y(), d.x());
  }
  std::sort(a.begin(), a.end());
  double best = a.front() + 2 * kPi - a.back();
  for (std::size_t k = 1; k < a.size(); ++k) best = std::min(best, a[k] - a[k - 1]);
  return best;
}

PlacementResult circular_placement(const SwarmState& state, const RadialPotential& pot, const ModelParams& params,
                                   double R, double L, const PipelineOptions& opts)
{
  params.validate();
  const Eigen::Index n = state.size();
  if (!(L > 0) || !(R > 0)) throw ConfigError("circular placement needs R, L > 0");
  if (!(min_pair_distance(state.x) > L)) throw GeometryError("circular placement needs pairwise distances > L");

  PlacementResult res;
  res.center = placement_center(state.x, opts.sim.seed);
  const Vec2 c = res.center;
  res.theta_min = min_angular_separation(state.x, c);
  if (!(R * std::sin(std::min(res.theta_min, kPi / 2)) > L))
    throw GeometryError("circular placement needs R > L / sin(theta_min)");

  std::vector<Eigen::Index> by_dist(static_cast<std::size_t>(n));
  std::iota(by_dist.begin(), by_dist.end(), Eigen::Index{0});
  std::stable_sort(by_dist.begin(), by_dist.end(), [&](Eigen::Index a, Eigen::Index b) {
    return (state.x.col(a) - c).norm() > (state.x.col(b) - c).norm();
  });

  Trajectory traj;
  SwarmState cur = state;
  for (Eigen::Index i : by_dist) {
    const Vec2 d = cur.x.col(i) - c;
    Points end = cur.x;
    end.col(i) = c + R * d.normalized();
    const double D = std::abs(d.norm() - R);
    if (D < 1e-12) continue;
    const double T = move_time(D, opts.v_max);
    PhasePlan p;
    PhaseSpec mv;
    mv.name = "radial_" + std::to_string(i);
    mv.law = [params, end, T, k1 = opts.k1, k2 = opts.k2](const SwarmState& start) {
      return pd_tracking(params, straight_move_path(start.x, end, start.t, T), k1, k2);
    };
    mv.max_duration = T;
    p.phases.push_back(mv);
    traj.append(run_plan(cur, pot, params, p, opts.sim));
    cur = traj.final_state();
  }

  // angles sorted and unwrapped into [a_0, a_0 + 2 pi), targets 2 pi k / N
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto angle = [&](Eigen::Index i) {
    const Vec2 d = state.x.col(i) - c;
    return std::atan2(d.y(), d.x());
  };
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return angle(a) < angle(b); });
  Eigen::VectorXd from(n), to(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    from(k) = angle(order[static_cast<std::size_t>(k)]);
    to(k) = 2 * kPi * static_cast<double>(k) / static_cast<double>(n);
  }
  const double T = move_time(R * (to - from).cwiseAbs().maxCoeff(), opts.v_max);
  const double t0 = cur.t;
  ReferencePath arc = [order, from, to, c, R, t0, T, n](double t) {
    const Smoothstep s = smoothstep5((t - t0) / T);
    TrackingReference ref{Points(2, n), Points(2, n), Points(2, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index i = order[static_cast<std::size_t>(k)];
      const double dphi = to(k) - from(k);
      const double p = from(k) + s.s * dphi, dp = s.ds / T * dphi, d2p = s.d2s / (T * T) * dphi;
      const Vec2 er(std::cos(p), std::sin(p));
      ref.x.col(i) = c + R * er;
      ref.v.col(i) = R * dp * perp(er);
      ref.a.col(i) = R * d2p * perp(er) - R * dp * dp * er;
    }
    return ref;
  };
  PhasePlan p;
  PhaseSpec eq;
  eq.name = "equispace";
  eq.law = [params, arc, k1 = opts.k1, k2 = opts.k2](const SwarmState&) { return pd_tracking(params, arc, k1, k2); };
  eq.max_duration = T + opts.min_hold;
  p.phases.push_back(eq);
  traj.append(run_plan(cur, pot, params, p, opts.sim));

  res.trajectory = std::move(traj);
  res.order = std::move(order);
  return res;
}

// ---------------------------------------------------------------- radius shrink

double radius_shrink_budget(const RadialPotential& pot, const ModelParams& params, RingKind kind, double R_from,
                            double R_to)
{
  const double Rmin = std::min(R_from, R_to), Rmax = std::max(R_from, R_to);
  const double lo = 2 * std::sin(kPi / params.N) * Rmin;
  const double sup = sampled_sup([&](double r) { return std::abs(potential_deriv(pot, r)); }, lo, 2 * Rmax, 20000);
  const double s2 = params.alpha / params.beta;
  return sup + (kind == RingKind::Mill ? s2 / Rmin : 0.0);
}

Trajectory radius_shrink(const SwarmState& state, const RadialPotential& pot, const ModelParams& params, RingKind kind,
                         const Vec2& center, double R_from, double R_to, double duration,
                         const PipelineOptions& opts, const Vec2& vbar)
{
  params.validate();
  if (!(duration > 0)) throw ConfigError("radius shrink needs a positive duration");
  if (kind == RingKind::Flock && vbar.norm() > 0 &&
      std::abs(vbar.norm() - params.cruise_speed()) > 1e-9 * std::max(1.0, params.cruise_speed()))
    throw ConfigError("radius shrink: |vbar| must equal the cruise speed");
  const double s = params.cruise_speed();
  const double g0 = s > 0 ? std::clamp(state.v.colwise().norm().mean() / s, 0.0, 1.0) : 1.0;

  PhasePlan p;
  PhaseSpec sh;
  sh.name = "shrink";
  const double hold = opts.min_hold;
  sh.law = [params, kind, center, R_from, R_to, duration, vbar, g0, k1 = opts.k1, k2 = opts.k2](const SwarmState& start) {
    return pd_tracking(params,
                       shrinking_ring_path(start, params, kind, center, R_from, R_to, start.t, duration, vbar, g0, 1.0),
                       k1, k2);
  };
  sh.max_duration = duration + hold;
  p.phases.push_back(sh);
  Trajectory traj = run_plan(state, pot, params, p, opts.sim);
  const double budget = radius_shrink_budget(pot, params, kind, R_from, R_to);
  if (budget > params.M)
    traj.warnings.push_back("radius shrink budget " + std::to_string(budget) + " exceeds M");
  return traj;
}

}  // namespace swarm
