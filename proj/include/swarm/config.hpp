#pragma once

// JSON configuration. Every record is strict: unknown keys raise ConfigError.

#include "swarm/analysis.hpp"
#include "swarm/controllers.hpp"
#include "swarm/dynamics.hpp"
#include "swarm/maneuvers.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace swarm {

using Json = nlohmann::ordered_json;

/// Strict reader over one JSON object. Each accessor marks its key as used;
/// finish() rejects anything left over.
class Record {
public:
  Record(const Json& j, std::string where);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer(const std::string& key, int fallback);
  std::uint64_t u64(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  Vec2 vec2(const std::string& key);
  Vec2 vec2(const std::string& key, const Vec2& fallback);
  const Json& raw(const std::string& key);
  const Json* optional(const std::string& key);
  void finish() const;
  const std::string& where() const { return where_; }

private:
  const Json& j_;
  std::string where_;
  std::vector<std::string> used_;
};

RadialPotential parse_potential(const Json& j);
Json to_json(const RadialPotential& pot);

ModelParams parse_params(const Json& j);
Json to_json(const ModelParams& p);

SimConfig parse_sim(const Json& j, SimConfig base = {});

/// Initial conditions: {"kind": "explicit" | "random" | "ring", ...}.
/// Random inits may be relaxed to an equilibrium and given a common velocity.
SwarmState make_initial(const Json& j, const RadialPotential& pot, const ModelParams& params, std::uint64_t seed);

/// Radius given as a number or "solve" (with an optional bracket) for the ring kind.
double parse_radius(const Json& j, const RadialPotential& pot, const ModelParams& params, RingKind kind,
                    double lo = 0.05, double hi = 20.0);

/// {"law": "<name>", ...}. Laws that depend on the phase start (quasi-static
/// plans, holds) take it from `start`.
ControlLaw parse_law(const Json& j, const RadialPotential& pot, const ModelParams& params, const SimConfig& sim,
                     const SwarmState& start);

/// Conjunction of state conditions, e.g. {"max_speed_below": 1e-3}.
StopCondition parse_stop(const Json& j, const ModelParams& params, std::string* description = nullptr);

/// JSON list of {"name", "law", "stop", "max_duration", "require"} records.
PhasePlan parse_plan(const Json& j, const RadialPotential& pot, const ModelParams& params, const SimConfig& sim);

PipelineOptions parse_pipeline_options(const Json& j, const SimConfig& sim);
InstantaneousSpec parse_instantaneous(const Json& j);

/// Replaces the value at a dotted path ("run.thetaT", "params.M"); the path
/// must already exist.
void set_by_path(Json& j, const std::string& path, const Json& value);

}  // namespace swarm
