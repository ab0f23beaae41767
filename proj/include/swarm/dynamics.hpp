#pragma once

#include "swarm/model.hpp"
#include "swarm/potential.hpp"
#include "swarm/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace swarm {

/// What a feedback law sees at one evaluation. `forces` are the interaction
/// forces F(x) of the true potential at `state`, computed once per stage by the
/// integrator and shared with the law.
struct ControlInput {
  double t;
  const SwarmState& state;
  const Points& forces;
};

/// A named map (t, state) -> controls, one column per agent. Laws must be pure:
/// the integrator re-evaluates them at every Runge-Kutta stage.
struct ControlLaw {
  std::string name;
  std::function<Points(const ControlInput&)> eval;

  Points operator()(const ControlInput& in) const { return eval(in); }
  /// Convenience evaluation that computes the forces itself.
  Points operator()(double t, const SwarmState& s, const RadialPotential& pot) const;
};

ControlLaw zero_control();

struct SimConfig {
  double dt = 1e-2;
  double t_end = 1.0;  // absolute end time
  int record_every = 10;
  std::uint64_t seed = 0;
  double guard = kGuardRadius;

  void validate(double t_start = 0.0) const;
};

struct OrderParameters {
  double polarization = 0.0;
  double ang_momentum = 0.0;
  double mean_radius = 0.0;
  double mean_speed = 0.0;
};

/// Polarization |sum v| / sum |v|, normalized angular momentum about the
/// centroid, mean distance to the centroid and mean speed. Zero denominators
/// give zero.
OrderParameters order_parameters(const SwarmState& state);

struct PhaseRecord {
  std::string name;
  double t_start = 0.0;
  double t_end = 0.0;
  std::string exit_reason;  // "predicate", "horizon" or "skipped"
  bool predicate_met = false;
};

struct Trajectory {
  // recorded samples
  std::vector<double> times;
  std::vector<SwarmState> states;
  std::vector<Points> controls;  // saturated control applied at each sample
  std::vector<double> energy;
  std::vector<OrderParameters> order;
  std::vector<double> max_control;  // max_i |u_i| at each sample

  // one entry per integration step, taken at the first stage
  std::vector<double> step_times;
  std::vector<double> step_u_max;      // after saturation
  std::vector<double> step_u_request;  // before saturation

  std::vector<PhaseRecord> phases;
  std::vector<std::string> warnings;
  bool stopped_early = false;

  bool empty() const { return states.empty(); }
  const SwarmState& final_state() const { return states.back(); }
  /// Concatenates `next`, dropping its first sample when it repeats our last.
  void append(Trajectory&& next);
};

struct Derivative {
  Points dx;
  Points dv;
};

/// dx_i = v_i, dv_i = (alpha - beta|v_i|^2) v_i - F_i(x) + u_i.
Derivative rhs(const SwarmState& state, const RadialPotential& pot, const ModelParams& params, const Points& u,
               double guard = kGuardRadius);

/// Radially rescales every u_i with |u_i| > M onto the circle of radius M.
Points saturate(const Points& u, double M);

/// max_i |u_i|
double max_norm(const Points& u);

struct StepInfo {
  Points u_request;  // first-stage control before saturation
  Points u_applied;  // first-stage control after saturation
  Points forces;     // F(x) at the start of the step
};

/// One classical RK4 step; the control is re-evaluated and saturated at each stage.
SwarmState step(const SwarmState& state, const RadialPotential& pot, const ModelParams& params, const ControlLaw& law,
                double dt, double guard = kGuardRadius, StepInfo* info = nullptr);

using StopCondition = std::function<bool(const SwarmState&, const Points& forces)>;

/// Integrates from init.t to config.t_end (or until `stop` holds), recording
/// every config.record_every steps plus the final state.
Trajectory simulate(const SwarmState& init, const RadialPotential& pot, const ModelParams& params,
                    const ControlLaw& law, const SimConfig& config, const StopCondition& stop = {});

}  // namespace swarm
