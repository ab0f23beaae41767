#pragma once

// Named experiment configurations, their runner and outcome checks.

#include "swarm/config.hpp"
#include "swarm/output.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swarm {

struct Scenario {
  std::string name;
  std::string description;
  double wall_budget_s = 60.0;  // desk-scale expectation, documented in the registry
  Json config;                  // potential, params, init, sim, run, checks, ...
};

/// Built-in scenarios in registry order.
const std::vector<Scenario>& scenario_registry();

/// Registry lookup; throws ConfigError for unknown names.
const Scenario& find_scenario(const std::string& name);

/// Scenario from a JSON file with the same layout as a registry entry.
Scenario load_scenario_file(const std::filesystem::path& file);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::filesystem::path out = "out";
  bool write = true;   // artifacts on disk
  bool plots = true;
  std::string format = "csv";  // trajectory format: csv or json
};

struct Check {
  std::string metric;
  std::string comparator;  // <, <=, >, >=, ==, near
  double value = 0.0;
  double tolerance = 0.0;  // for near
};

struct CheckResult {
  Check check;
  std::string variant;
  double actual = 0.0;
  bool pass = false;
};

struct VariantResult {
  std::string label;
  Json overrides;
  Trajectory trajectory;
  Json metrics;
};

struct ScenarioResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<VariantResult> variants;
  std::vector<CheckResult> checks;
  Json summary;
  std::filesystem::path dir;

  bool passed() const;
  /// Description of the first failed check, empty if none failed.
  std::string first_failure() const;
};

/// Runs one run record ({"kind": "law" | "plan" | "pipeline" | "chain", ...})
/// from `init`. `target_radius` is set when the run defines one.
Trajectory execute_run(const Json& run, const RadialPotential& pot, const ModelParams& params, const SwarmState& init,
                       const SimConfig& sim);

/// Terminal metrics of a trajectory. `target_radius` enables radius_error.
Json trajectory_metrics(const Trajectory& traj, const RadialPotential& pot, const ModelParams& params,
                        const SimConfig& sim, std::optional<double> target_radius);

bool evaluate_check(const Check& c, double actual);
Check parse_check(const Json& j);

/// Runs every variant, evaluates checks and writes artifacts under
/// out/<name>/seed-<seed>/ when opts.write is set.
ScenarioResult run_scenario(const Scenario& sc, const RunOptions& opts = {});

}  // namespace swarm
