#include "swarm/controllers.hpp"

#include "swarm/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace swarm {

namespace {

Points cancellation(const SwarmState& s, const Points& F, const ModelParams& p)
{
  const Eigen::RowVectorXd gain = p.alpha - p.beta * s.v.colwise().squaredNorm().array();
  Points u = -(s.v.array().rowwise() * gain.array()).matrix();
  u += F;
  return u;
}

Vec2 clip_box(const Vec2& u, double box)
{
  return u.cwiseMax(-box).cwiseMin(box);
}

}  // namespace

// ---------------------------------------------------------------- JQ

double jq_gamma_lower_bound(const ModelParams& p)
{
  return std::max(1.0, std::sqrt(p.alpha * p.alpha * p.alpha / p.beta) / p.M);
}

Vec2 jq_control(const Vec2& v, const ModelParams& p, double gamma)
{
  const double s = p.cruise_speed();
  const double a1 = s / gamma, a2 = gamma * s;
  const double n = v.norm();
  if (n >= 2 * a2) return Vec2::Zero();
  if (n > a2) return -p.M * (v / n) * (2.0 - n / a2);
  if (n >= a1) return -p.M * v / n;
  return -(p.M * gamma / s) * v;
}

ControlLaw jq_feedback(const ModelParams& params, const JQParams& jq)
{
  params.validate();
  if (!(params.alpha > 0)) throw ConfigError("jq_feedback needs alpha > 0");
  const double lb = jq_gamma_lower_bound(params);
  if (!(jq.gamma > lb))
    throw ThresholdError("jq gamma " + std::to_string(jq.gamma) + " must exceed " + std::to_string(lb));
  return {"jq", [params, g = jq.gamma](const ControlInput& in) {
            Points u(2, in.state.size());
            for (Eigen::Index i = 0; i < u.cols(); ++i) u.col(i) = jq_control(in.state.v.col(i), params, g);
            return u;
          }};
}

// ---------------------------------------------------------------- cancellation laws

ControlLaw velocity_kill(const ModelParams& params, double eta, double dt)
{
  if (!(eta > 0) || !(dt > 0)) throw ConfigError("velocity_kill needs eta > 0 and dt > 0");
  return {"velocity_kill", [params, eta, dt](const ControlInput& in) {
            Points u = cancellation(in.state, in.forces, params);
            for (Eigen::Index i = 0; i < u.cols(); ++i) {
              const Vec2 v = in.state.v.col(i);
              const double n = v.norm();
              u.col(i) -= n > eta * dt ? Vec2(eta * v / n) : Vec2(v / dt);
            }
            return u;
          }};
}

ControlLaw cancel_and_inject(const ModelParams& params, ControlLaw w, double w_bound)
{
  if (!(w_bound > 0)) throw ConfigError("cancel_and_inject needs w_bound > 0");
  return {"cancel_inject(" + w.name + ")", [params, w = std::move(w), w_bound](const ControlInput& in) {
            return (cancellation(in.state, in.forces, params) + saturate(w(in), w_bound)).eval();
          }};
}

ControlLaw flock_hold()
{
  return {"flock_hold", [](const ControlInput& in) { return in.forces; }};
}

// ---------------------------------------------------------------- quasi-static flock rotation

double QuasiStaticPlan::theta(double t) const
{
  const double tau = std::clamp((t - t0) / T, 0.0, 1.0);
  return theta0 + tau * (thetaT - theta0);
}

void QuasiStaticPlan::validate(const ModelParams& params) const
{
  if (!(T > 0)) throw ConfigError("quasi-static plan needs T > 0");
  if (std::abs(v0.norm() - params.cruise_speed()) > 1e-9)
    throw ConfigError("quasi-static plan: |v0| must equal the cruise speed");
}

ControlLaw quasi_static_rotation(double M, const QuasiStaticPlan& plan)
{
  if (!(M > 0)) throw ConfigError("quasi_static_rotation needs M > 0");
  return {"quasi_static_rotation", [M, plan](const ControlInput& in) {
            const Vec2 ref = rotation(plan.theta(in.t)) * plan.v0;
            return (-M * (in.state.v.colwise() - ref)).eval();
          }};
}

// ---------------------------------------------------------------- mills

ControlLaw mill_centripetal(double R, const Vec2& center)
{
  if (!(R > 0)) throw ConfigError("mill_centripetal needs R > 0");
  return {"mill_centripetal", [R, center](const ControlInput& in) {
            Points u = in.forces;
            for (Eigen::Index i = 0; i < u.cols(); ++i) {
              const Vec2 d = in.state.x.col(i) - center;
              const double n = d.norm();
              if (n < kGuardRadius) throw GeometryError("mill_centripetal: agent at the mill center");
              u.col(i) -= in.state.v.col(i).squaredNorm() / R * d / n;
            }
            return u;
          }};
}

ControlLaw mill_velocity_feedback(double M, const ModelParams& params, int orientation)
{
  const double s = params.cruise_speed();
  const double o = orientation >= 0 ? 1.0 : -1.0;
  return {"mill_velocity_feedback", [M, s, o](const ControlInput& in) {
            const Vec2 xm = in.state.x.rowwise().mean();
            Points u(2, in.state.size());
            for (Eigen::Index i = 0; i < u.cols(); ++i) {
              const Vec2 d = in.state.x.col(i) - xm;
              const double n = d.norm();
              if (n < kGuardRadius) throw GeometryError("mill_velocity_feedback: agent at the centroid");
              u.col(i) = -M * (in.state.v.col(i) - s * o * perp(d) / n);
            }
            return u;
          }};
}

// ---------------------------------------------------------------- instantaneous controls

void InstantaneousSpec::validate() const
{
  if (!(dt_horizon > 0)) throw ConfigError("instantaneous control needs dt_horizon > 0");
  if (lambda1 < 0 || lambda2 < 0 || lambda < 0) throw ConfigError("instantaneous control weights must be >= 0");
  if (!(box > 0)) throw ConfigError("instantaneous control box must be > 0");
}

Points distribute_rotated(const Vec2& u, Eigen::Index N)
{
  Points out(2, N);
  for (Eigen::Index i = 0; i < N; ++i)
    out.col(i) = rotation(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(N)) * u;
  return out;
}

namespace {

// Shared-control mill problem with the drift part of the prediction cached.
class MillProblem {
public:
  MillProblem(const SwarmState& s, const Points& F, const ModelParams& p, const InstantaneousSpec& spec)
      : spec_(spec), s_(p.cruise_speed()), h_(spec.dt_horizon), x_(s.x), rot_(distribute_rotated(Vec2(1, 0), s.size()))
  {
    const Eigen::RowVectorXd gain = p.alpha - p.beta * s.v.colwise().squaredNorm().array();
    Points g = (s.v.array().rowwise() * gain.array()).matrix() - F;
    vbase_ = s.v + h_ * g;
    if (spec.predictor == Predictor::ExplicitEuler) {
      xpred_ = s.x + h_ * s.v;
      const Vec2 xm = xpred_.rowwise().mean();
      targets_.resize(2, s.size());
      radius_cost_ = 0.0;
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        const Vec2 rel = xpred_.col(i) - xm;
        targets_.col(i) = target(rel);
        const double e = rel.squaredNorm() - spec.R_target * spec.R_target;
        radius_cost_ += e * e;
      }
    }
  }

  double operator()(const Vec2& u) const
  {
    const Eigen::Index n = x_.cols();
    double cost = spec_.lambda1 * u.norm() + spec_.lambda2 * u.squaredNorm();
    Points v1(2, n);
    for (Eigen::Index i = 0; i < n; ++i) v1.col(i) = vbase_.col(i) + h_ * rotated(u, i);
    if (spec_.predictor == Predictor::ExplicitEuler) {
      cost += radius_cost_;
      for (Eigen::Index i = 0; i < n; ++i) cost += (v1.col(i) - targets_.col(i)).norm();
      return cost;
    }
    const Points x1 = x_ + h_ * v1;
    const Vec2 xm = x1.rowwise().mean();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2 rel = x1.col(i) - xm;
      const double e = rel.squaredNorm() - spec_.R_target * spec_.R_target;
      cost += (v1.col(i) - target(rel)).norm() + e * e;
    }
    return cost;
  }

private:
  Vec2 rotated(const Vec2& u, Eigen::Index i) const
  {
    const double c = rot_(0, i), sn = rot_(1, i);
    return {c * u(0) - sn * u(1), sn * u(0) + c * u(1)};
  }

  Vec2 target(const Vec2& rel) const
  {
    const Vec2 t = perp(rel);
    const double n2 = t.squaredNorm();
    if (n2 == 0.0) return Vec2::Zero();
    return spec_.mill_target == MillTarget::AsWritten ? Vec2(s_ * t / n2) : Vec2(s_ * t / std::sqrt(n2));
  }

  InstantaneousSpec spec_;
  double s_;
  double h_;
  Points x_;
  Points rot_;
  Points vbase_;
  Points xpred_;
  Points targets_;
  double radius_cost_ = 0.0;
};

}  // namespace

double instantaneous_mill_objective(const SwarmState& state, const Points& forces, const ModelParams& params,
                                    const InstantaneousSpec& spec, const Vec2& u)
{
  return MillProblem(state, forces, params, spec)(u);
}

Vec2 instantaneous_mill_control(const SwarmState& state, const Points& forces, const ModelParams& params,
                                const InstantaneousSpec& spec)
{
  const MillProblem J(state, forces, params, spec);
  const double b = spec.box;
  constexpr int kGrid = 41;
  Vec2 best(-b, -b);
  double fbest = std::numeric_limits<double>::infinity();
  for (int a = 0; a < kGrid; ++a) {
    for (int c = 0; c < kGrid; ++c) {
      const Vec2 u(-b + 2 * b * a / (kGrid - 1), -b + 2 * b * c / (kGrid - 1));
      const double f = J(u);
      // strict improvement keeps the lexicographically first minimizer
      if (f < fbest) {
        fbest = f;
        best = u;
      }
    }
  }
  // projected gradient with central-difference gradients and backtracking
  double step = 2 * b / (kGrid - 1);
  for (int it = 0; it < 100 && step > 1e-12; ++it) {
    constexpr double h = 1e-7;
    const Vec2 g((J(best + Vec2(h, 0)) - J(best - Vec2(h, 0))) / (2 * h),
                 (J(best + Vec2(0, h)) - J(best - Vec2(0, h))) / (2 * h));
    const double gn = g.norm();
    if (!(gn > 1e-10)) break;
    bool moved = false;
    while (step > 1e-12) {
      const Vec2 cand = clip_box(best - step * g / gn, b);
      const double f = J(cand);
      if (f < fbest) {
        best = cand;
        fbest = f;
        moved = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return best;
}

Vec2 instantaneous_mill_control(const SwarmState& state, const RadialPotential& pot, const ModelParams& params,
                                const InstantaneousSpec& spec)
{
  return instantaneous_mill_control(state, interaction_forces(pot, state.x), params, spec);
}

ControlLaw instantaneous_mill_law(const ModelParams& params, const InstantaneousSpec& spec)
{
  spec.validate();
  return {"instantaneous_mill", [params, spec](const ControlInput& in) {
            return distribute_rotated(instantaneous_mill_control(in.state, in.forces, params, spec), in.state.size());
          }};
}

namespace {

// Per-agent flock problem: v' = vb + h u, x' = xb + k u with k = h^2 for the
// semi-implicit predictor and 0 for explicit Euler.
struct FlockAgentProblem {
  Vec2 vb, xb, xm, vbar;
  double h, k, R2, lambda;

  double value(const Vec2& u) const
  {
    const Vec2 v1 = vb + h * u;
    const Vec2 rho = xb + k * u - xm;
    const double e = rho.squaredNorm() - R2;
    return (v1 - vbar).squaredNorm() + e * e + lambda * u.squaredNorm();
  }

  Vec2 gradient(const Vec2& u) const
  {
    const Vec2 v1 = vb + h * u;
    const Vec2 rho = xb + k * u - xm;
    const double e = rho.squaredNorm() - R2;
    return 2 * h * (v1 - vbar) + 4 * k * e * rho + 2 * lambda * u;
  }
};

std::vector<FlockAgentProblem> flock_problems(const SwarmState& s, const Points& F, const ModelParams& p,
                                              const InstantaneousSpec& spec)
{
  const double h = spec.dt_horizon;
  const Eigen::RowVectorXd gain = p.alpha - p.beta * s.v.colwise().squaredNorm().array();
  const Points vb = s.v + h * ((s.v.array().rowwise() * gain.array()).matrix() - F);
  const bool semi = spec.predictor == Predictor::SemiImplicitEuler;
  const Points xb = s.x + h * (semi ? vb : s.v);
  const Vec2 xm = xb.rowwise().mean();
  std::vector<FlockAgentProblem> out;
  out.reserve(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i)
    out.push_back({vb.col(i), xb.col(i), xm, spec.v_bar, h, semi ? h * h : 0.0, spec.R_target * spec.R_target,
                   spec.lambda});
  return out;
}

Vec2 solve_box(const FlockAgentProblem& P, double box)
{
  Vec2 u = Vec2::Zero();
  double f = P.value(u);
  double step = 1.0;
  for (int it = 0; it < 200; ++it) {
    const Vec2 g = P.gradient(u);
    if ((clip_box(u - g, box) - u).norm() < 1e-8) break;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vec2 cand = clip_box(u - step * g, box);
      const double fc = P.value(cand);
      if (fc <= f - 1e-4 / step * (cand - u).squaredNorm()) {
        u = cand;
        f = fc;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    step = std::min(step * 2.0, 1e6);
  }
  return u;
}

}  // namespace

double instantaneous_flock_objective(const SwarmState& state, const Points& forces, const ModelParams& params,
                                     const InstantaneousSpec& spec, Eigen::Index i, const Vec2& u)
{
  return flock_problems(state, forces, params, spec)[static_cast<std::size_t>(i)].value(u);
}

Points instantaneous_flock_control(const SwarmState& state, const Points& forces, const ModelParams& params,
                                   const InstantaneousSpec& spec)
{
  const auto problems = flock_problems(state, forces, params, spec);
  Points u(2, state.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) u.col(i) = solve_box(problems[static_cast<std::size_t>(i)], spec.box);
  return u;
}

Points instantaneous_flock_control(const SwarmState& state, const RadialPotential& pot, const ModelParams& params,
                                   const InstantaneousSpec& spec)
{
  return instantaneous_flock_control(state, interaction_forces(pot, state.x), params, spec);
}

ControlLaw instantaneous_flock_law(const ModelParams& params, const InstantaneousSpec& spec)
{
  spec.validate();
  return {"instantaneous_flock", [params, spec](const ControlInput& in) {
            return instantaneous_flock_control(in.state, in.forces, params, spec);
          }};
}

// ---------------------------------------------------------------- fictitious potential

double surrogate_cutoff(double r, double R0)
{
  const double t = std::clamp(r - R0, 0.0, 1.0);
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

RepulsiveSurrogate build_repulsive_surrogate(const RadialPotential& pot, double eta, double R0)
{
  if (!(eta > 0)) throw ConfigError("surrogate needs eta > 0");
  if (!(R0 > 0)) throw ConfigError("surrogate needs R0 > 0");
  const double tmf = force_bounds(pot, 1.0, 2).tilde_M_F;
  if (is_unbounded(tmf)) throw ConfigError("surrogate needs sup U' < infinity");
  const double bad = sampled_sup([&](double r) { return std::abs(potential_deriv(pot, r)); }, R0, 1e6, 20000);
  if (bad >= eta) throw ConfigError("surrogate: |U'| reaches eta beyond R0");
  RepulsiveSurrogate s;
  s.eta = eta;
  s.R0 = R0;
  s.tilde_M_F = tmf;
  s.dU = [pot, eta, R0, tmf](double r) {
    const double phi = surrogate_cutoff(r, R0);
    const double core = phi > 0 ? phi * (potential_deriv(pot, r) - tmf) : 0.0;
    return core - eta / (1.0 + r * r);
  };
  return s;
}

ControlLaw fictitious_potential_control(const RadialDeriv& surrogate, ControlLaw w, double guard)
{
  return {"fictitious(" + w.name + ")", [surrogate, w = std::move(w), guard](const ControlInput& in) {
            const Points Ft = radial_forces(surrogate, in.state.x, guard);
            const Points inner = w(ControlInput{in.t, in.state, Ft});
            return (in.forces - Ft + inner).eval();
          }};
}

double surrogate_deviation(const RadialPotential& pot, const RadialDeriv& surrogate, double r_lo, double r_hi)
{
  return sampled_sup([&](double r) { return std::abs(potential_deriv(pot, r) - surrogate(r)); }, r_lo, r_hi, 20000);
}

// ---------------------------------------------------------------- sparsification

Eigen::Index sparse_active_agent(double t, const SparsifySpec& spec, Eigen::Index N)
{
  const auto k = static_cast<long long>(std::floor((t - spec.t0) / spec.slot + 1e-9));
  const auto n = static_cast<long long>(N);
  return static_cast<Eigen::Index>(((k % n) + n) % n);
}

ControlLaw sparsify(ControlLaw inner, const SparsifySpec& spec)
{
  if (!(spec.slot > 0)) throw ConfigError("sparsify needs slot > 0");
  return {"sparse(" + inner.name + ")", [inner = std::move(inner), spec](const ControlInput& in) {
            const Eigen::Index n = in.state.size();
            const Eigen::Index k = sparse_active_agent(in.t, spec, n);
            const Points full = inner(in);
            Points u = Points::Zero(2, n);
            Vec2 uk = static_cast<double>(n) * full.col(k);
            const double norm = uk.norm();
            if (norm > spec.sparse_bound) uk *= spec.sparse_bound / norm;
            u.col(k) = uk;
            return u;
          }};
}

bool sparsify_bound_insufficient(const SparsifySpec& spec, const ModelParams& params)
{
  return spec.sparse_bound <= params.N * threshold_M_alpha_beta(params);
}

// ---------------------------------------------------------------- tracking

ControlLaw pd_tracking(const ModelParams& params, ReferencePath ref, double k1, double k2)
{
  if (!(k1 > 0) || !(k2 > 0)) throw ConfigError("pd_tracking needs k1, k2 > 0");
  return {"pd_tracking", [params, ref = std::move(ref), k1, k2](const ControlInput& in) {
            const TrackingReference r = ref(in.t);
            Points u = cancellation(in.state, in.forces, params);
            u += r.a - k1 * (in.state.x - r.x) - k2 * (in.state.v - r.v);
            return u;
          }};
}

}  // namespace swarm
