#pragma once

// Multi-phase steering pipelines built from the feedback laws.

#include "swarm/analysis.hpp"
#include "swarm/controllers.hpp"
#include "swarm/dynamics.hpp"
#include "swarm/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace swarm {

/// Builds the law of a phase from the state at which the phase starts.
using LawFactory = std::function<ControlLaw(const SwarmState& start)>;

struct PhaseSpec {
  std::string name;
  LawFactory law;
  StopCondition stop;           // empty: run for the full duration
  std::string predicate = "horizon";
  double max_duration = 100.0;  // hard cap
  bool require_predicate = true;
  bool until_horizon = false;    // run to the plan horizon, at least min_duration
  double min_duration = 0.0;
  bool skip = false;             // recorded as skipped, not integrated
};

struct PhasePlan {
  std::vector<PhaseSpec> phases;
  void validate() const;
};

/// Runs the phases back to back. A phase whose predicate is not met by its
/// cap raises PhaseTimeoutError when require_predicate is set.
Trajectory run_plan(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                    const PhasePlan& plan, const SimConfig& sim);

struct PipelineOptions {
  SimConfig sim;             // dt, record_every and guard; t_end is the overall horizon
  double gamma = 0.0;        // JQ gain; 0 picks 1.1 times the lower bound
  double nu = 0.1;           // speed fraction injected before the final hold
  double k1 = 1.0;           // PD gains for placement and tracking
  double k2 = 2.0;
  double phase_cap = 1000.0; // time cap per phase
  double min_hold = 10.0;    // final phase length when the horizon is already reached
  double v_max = 0.5;        // speed limit for quasi-static moves
};

/// eps' = min(eps/(1 + L/2), M/(2 + alpha + L/2)) with L a Lipschitz bound of grad W.
double stabilization_threshold(const RadialPotential& pot, const ModelParams& params, double eps);

/// JQ -> velocity kill -> inject nu*vbar -> flock hold. An initial flock skips
/// the first three phases (and is rotated quasi-statically if its heading differs).
Trajectory flock_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                          const Vec2& target_vbar, double eps, const PipelineOptions& opts = {});

struct MillCluster {
  std::vector<Eigen::Index> agents;
  Vec2 center = Vec2::Zero();
  double R = 1.0;
};

/// JQ -> velocity kill -> rotating-ring placement -> centripetal hold. An
/// initial mill at (center, R_mill) skips straight to the hold.
Trajectory mill_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                         const Vec2& center, double R_mill, double eps, const PipelineOptions& opts = {});

/// Same pipeline with one ring per cluster; every agent must belong to exactly one cluster.
Trajectory mill_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                         const std::vector<MillCluster>& clusters, double eps, const PipelineOptions& opts = {});

/// Quasi-static heading change then flock hold. Throws TrackingError if the
/// relative positions move by more than `envelope`.
Trajectory flock_to_flock(const SwarmState& init_flock, const RadialPotential& pot, const ModelParams& params,
                          const QuasiStaticPlan& plan, const PipelineOptions& opts = {}, double envelope = 1.0);

/// Instantaneous flock control until polarization > 0.99 and the mean radius
/// is within 5% of R_f, then flock hold.
Trajectory mill_to_flock(const SwarmState& init_mill, const RadialPotential& pot, const ModelParams& params,
                         const Vec2& vbar, double R_f, InstantaneousSpec spec, const PipelineOptions& opts = {});

/// Quintic smoothstep on [0, 1] and its first two derivatives.
struct Smoothstep {
  double s, ds, d2s;
};
Smoothstep smoothstep5(double tau);

/// Straight-line move of some agents with everyone else held in place, as a
/// reference path for pd_tracking.
ReferencePath straight_move_path(const Points& start, const Points& end, double t0, double T);

struct BlowupOptions {
  double jq_speed_tol = 1e-3;
  double jq_force_tol = 1e-3;
  double jq_cap = 400.0;
  double R0 = 0.0;  // surrogate cutoff radius; 0 picks the decay radius for eta
};

struct BlowupResult {
  Trajectory trajectory;
  std::vector<Eigen::Index> order;  // extraction order
  std::vector<double> targets;      // distance to the remaining agents required of each extraction
  double surrogate_deviation = 0.0; // sup |U' - U~'|
};

/// Fictitious-repulsion JQ, then repeated outer-vertex extraction until all
/// pairwise distances exceed L.
BlowupResult blowup_pipeline(const SwarmState& init, const RadialPotential& pot, const ModelParams& params, double eta,
                             double L, const PipelineOptions& opts = {}, const BlowupOptions& bopts = {});

struct PlacementResult {
  Trajectory trajectory;
  Vec2 center = Vec2::Zero();
  std::vector<Eigen::Index> order;  // order[k] is the agent sent to angle 2 pi k / N
  double theta_min = 0.0;
};

/// Picks a center off every line through two agents (seeded by opts.sim.seed).
Vec2 placement_center(const Points& x, std::uint64_t seed);

/// Smallest angular gap between agents seen from `center`.
double min_angular_separation(const Points& x, const Vec2& center);

/// Radial moves to radius R (farthest agent first), then a simultaneous
/// angular interpolation onto the equispaced ring. Requires pairwise
/// distances > L and R > L / sin(theta_min).
PlacementResult circular_placement(const SwarmState& state, const RadialPotential& pot, const ModelParams& params,
                                   double R, double L, const PipelineOptions& opts = {});

/// Reference ring whose radius moves from R_from to R_to over [t0, t0 + T].
/// Flock: translating with velocity vbar. Mill: rotating with omega = s/R(t).
/// The speed fraction of the reference ramps from `speed_from` to `speed_to`
/// (fractions of the cruise speed) over the same interval.
ReferencePath shrinking_ring_path(const SwarmState& start, const ModelParams& params, RingKind kind,
                                  const Vec2& center, double R_from, double R_to, double t0, double T,
                                  const Vec2& vbar = Vec2::Zero(), double speed_from = 1.0, double speed_to = 1.0);

/// Bound on the tracking control along the shrink: sup |U'| over pair
/// distances of the rings involved, plus s^2/R_min for mills.
double radius_shrink_budget(const RadialPotential& pot, const ModelParams& params, RingKind kind, double R_from,
                            double R_to);

/// PD tracking of the shrinking ring for `duration`, then a hold of min_hold
/// on the final ring. The state must start on the R_from ring about `center`.
Trajectory radius_shrink(const SwarmState& state, const RadialPotential& pot, const ModelParams& params, RingKind kind,
                         const Vec2& center, double R_from, double R_to, double duration,
                         const PipelineOptions& opts = {}, const Vec2& vbar = Vec2::Zero());

}  // namespace swarm
