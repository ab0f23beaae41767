#pragma once

// Feedback laws. Every constructor returns a pure ControlLaw; saturation to
// the model bound M is applied by the integrator, not here.

#include "swarm/dynamics.hpp"

#include <functional>

namespace swarm {

struct JQParams {
  double gamma = 2.0;
};

/// max(1, sqrt(alpha^3/beta) / M); gamma must exceed it.
double jq_gamma_lower_bound(const ModelParams& params);

/// Single-agent evaluation of the Jurdjevic-Quinn law.
Vec2 jq_control(const Vec2& v, const ModelParams& params, double gamma);

/// Throws ThresholdError if gamma is not above its lower bound.
ControlLaw jq_feedback(const ModelParams& params, const JQParams& jq);

/// Constant-rate braking with cancellation of propulsion and interaction.
/// Below |v| = eta*dt the ramp becomes the linear pin -v/dt, which is
/// continuous with the ramp and avoids v/|v| at rest.
ControlLaw velocity_kill(const ModelParams& params, double eta, double dt);

/// u = -(alpha - beta|v|^2) v + F + w, turning the plant into a double
/// integrator driven by w. Each w_i is clipped to w_bound.
ControlLaw cancel_and_inject(const ModelParams& params, ControlLaw w, double w_bound);

/// u = F.
ControlLaw flock_hold();

struct QuasiStaticPlan {
  double theta0 = 0.0;
  double thetaT = 0.0;
  double T = 1.0;
  Vec2 v0 = Vec2::Zero();  // reference velocity at angle 0 of the rotation, |v0| = cruise speed
  double t0 = 0.0;         // plan start time

  double theta(double t) const;
  void validate(const ModelParams& params) const;
};

/// u = -M (v - R_theta(t) v0); theta is held at thetaT after the plan ends.
ControlLaw quasi_static_rotation(double M, const QuasiStaticPlan& plan);

/// u = F - (|v|^2/R) (x - c)/|x - c|.
ControlLaw mill_centripetal(double R, const Vec2& center = Vec2::Zero());

/// u = -M (v - s * orientation * (x - x_m)^perp / |x - x_m|), x_m the centroid.
ControlLaw mill_velocity_feedback(double M, const ModelParams& params, int orientation = 1);

enum class Predictor { ExplicitEuler, SemiImplicitEuler };
enum class MillTarget { AsWritten, UnitTangent };

struct InstantaneousSpec {
  double dt_horizon = 0.1;
  double R_target = 1.0;
  Vec2 v_bar = Vec2::Zero();
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  double lambda = 0.1;
  double box = 1.0;
  Predictor predictor = Predictor::ExplicitEuler;
  MillTarget mill_target = MillTarget::AsWritten;

  void validate() const;
};

/// Cost of the shared-control mill problem at u, with the one-step predicted
/// state. `forces` is F at the current positions.
double instantaneous_mill_objective(const SwarmState& state, const Points& forces, const ModelParams& params,
                                    const InstantaneousSpec& spec, const Vec2& u);

/// Minimizer over the box of the shared-control mill objective: 41x41 grid,
/// then projected-gradient refinement. Agent i receives R_{2 pi i/N} u.
Vec2 instantaneous_mill_control(const SwarmState& state, const Points& forces, const ModelParams& params,
                                const InstantaneousSpec& spec);
Vec2 instantaneous_mill_control(const SwarmState& state, const RadialPotential& pot, const ModelParams& params,
                                const InstantaneousSpec& spec);

/// Spreads a shared control to agents by the per-index rotation.
Points distribute_rotated(const Vec2& u, Eigen::Index N);

ControlLaw instantaneous_mill_law(const ModelParams& params, const InstantaneousSpec& spec);

/// Per-agent cost of the flock problem; the centroid is frozen at the
/// uncontrolled prediction so the agents decouple.
double instantaneous_flock_objective(const SwarmState& state, const Points& forces, const ModelParams& params,
                                     const InstantaneousSpec& spec, Eigen::Index i, const Vec2& u);

/// Independent box-constrained minimization for each agent by projected
/// gradient with backtracking (200 iterations, gradient-norm stop 1e-8).
Points instantaneous_flock_control(const SwarmState& state, const Points& forces, const ModelParams& params,
                                   const InstantaneousSpec& spec);
Points instantaneous_flock_control(const SwarmState& state, const RadialPotential& pot, const ModelParams& params,
                                   const InstantaneousSpec& spec);

ControlLaw instantaneous_flock_law(const ModelParams& params, const InstantaneousSpec& spec);

using RadialDeriv = std::function<double(double)>;

struct RepulsiveSurrogate {
  RadialDeriv dU;          // the surrogate derivative
  double eta = 0.0;
  double R0 = 0.0;
  double tilde_M_F = 0.0;  // sup U' of the true potential
};

/// C^2 smoothstep falling from 1 at r <= R0 to 0 at r >= R0 + 1.
double surrogate_cutoff(double r, double R0);

/// dU~(r) = phi(r) (U'(r) - sup U') - eta/(1 + r^2). Throws ConfigError if
/// |U'| >= eta somewhere on [R0, 1e6] or if sup U' is unbounded.
RepulsiveSurrogate build_repulsive_surrogate(const RadialPotential& pot, double eta, double R0);

/// u = F - F~ + w where F~ are the forces of the surrogate; w sees F~.
ControlLaw fictitious_potential_control(const RadialDeriv& surrogate, ControlLaw w, double guard = kGuardRadius);

/// sup_r |U'(r) - dU~(r)| on a log grid over [r_lo, r_hi].
double surrogate_deviation(const RadialPotential& pot, const RadialDeriv& surrogate, double r_lo = 1e-3,
                           double r_hi = 1e3);

struct SparsifySpec {
  double slot = 1e-2;          // slot length, usually the step size
  double t0 = 0.0;             // slot origin
  double sparse_bound = 1e300; // clip for the amplified control
};

/// Agent of the slot containing t: floor((t - t0)/slot) mod N.
Eigen::Index sparse_active_agent(double t, const SparsifySpec& spec, Eigen::Index N);

/// Round-robin: in slot k only agent k mod N is active and receives N times
/// the inner control.
ControlLaw sparsify(ControlLaw inner, const SparsifySpec& spec);

/// True when sparse_bound < N * M_{alpha,beta}.
bool sparsify_bound_insufficient(const SparsifySpec& spec, const ModelParams& params);

struct TrackingReference {
  Points x;  // reference positions
  Points v;  // reference velocities
  Points a;  // reference accelerations
};

using ReferencePath = std::function<TrackingReference(double t)>;

/// u = -(alpha - beta|v|^2) v + F + a_ref - k1 (x - x_ref) - k2 (v - v_ref).
ControlLaw pd_tracking(const ModelParams& params, ReferencePath ref, double k1 = 1.0, double k2 = 2.0);

}  // namespace swarm
