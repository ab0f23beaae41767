#include "swarm/scenario.hpp"

#include "swarm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace swarm {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- registry

const char* kStep11 = R"json({
  "description": "Jurdjevic-Quinn stabilization of a quasi-Morse swarm from rest; uncontrolled comparison run",
  "seed": 7,
  "potential": {"family": "quasi_morse", "C": 0.6, "l": 0.5, "p": 1.5},
  "params": {"alpha": 2, "beta": 1.5, "M": 2, "N": 200},
  "init": {"kind": "random", "box_lo": [-2, -2], "box_hi": [2, 2], "speed_disk": 0},
  "sim": {"dt": 0.01, "t_end": 200, "record_every": 100},
  "run": {"kind": "law", "law": {"law": "jq", "gamma": 1.5}},
  "compare_uncontrolled": {"t_end": 50},
  "checks": [
    {"metric": "final_max_speed", "comparator": "<", "value": 1e-2},
    {"metric": "final_max_force", "comparator": "<", "value": 1e-1},
    {"metric": "energy_violations", "comparator": "==", "value": 0},
    {"metric": "uncontrolled_mean_speed", "comparator": "near", "value": 1.1547005383792515, "tolerance": 5e-2}
  ]
})json";

const char* kQuasi = R"json({
  "description": "Quasi-static rotation of a relaxed quasi-Morse flock, swept over the final heading",
  "seed": 7,
  "potential": {"family": "quasi_morse", "C": 0.6, "l": 0.5, "p": 1.5},
  "params": {"alpha": 2, "beta": 1.5, "M": 2, "N": 200},
  "init": {"kind": "random", "box_lo": [-2, -2], "box_hi": [2, 2], "relax": 1e-6, "velocity": [1.1547005383792515, 0]},
  "sim": {"dt": 0.02, "t_end": 120, "record_every": 50},
  "run": {"kind": "pipeline", "pipeline": "flock_to_flock", "thetaT": 1.5707963267948966, "T": 100},
  "sweep": {"key": "run.thetaT", "values": [0.7853981633974483, 1.5707963267948966]},
  "checks": [
    {"metric": "final_angle_error", "comparator": "<", "value": 0.05},
    {"metric": "final_speed_dev", "comparator": "<", "value": 1e-3},
    {"metric": "relative_position_drift", "comparator": "<", "value": 1e-2}
  ]
})json";

const char* kMill1 = R"json({
  "description": "Uncontrolled power-law mill ring started at the solved radius",
  "seed": 1,
  "potential": {"family": "power_law", "a": 4, "b": 1},
  "params": {"alpha": 10, "beta": 3, "M": 10, "N": 200},
  "init": {"kind": "ring", "ring": "mill", "R": "solve", "R_offset": 0, "gamma0": 0},
  "sim": {"dt": 0.005, "t_end": 20, "record_every": 40},
  "run": {"kind": "law", "law": {"law": "none"}},
  "target_radius": {"ring": "mill", "R": "solve"},
  "checks": [
    {"metric": "radius_error", "comparator": "<", "value": 1e-2},
    {"metric": "final_ang_momentum", "comparator": ">", "value": 0.99}
  ]
})json";

const char* kInstcont = R"json({
  "description": "Instantaneous shared mill control from a flock ring, N = 20",
  "seed": 1,
  "potential": {"family": "power_law", "a": 4, "b": 1},
  "params": {"alpha": 10, "beta": 3, "M": 10, "N": 20},
  "init": {"kind": "ring", "ring": "flock", "R": "solve", "vbar": [1.8257418583505538, 0]},
  "sim": {"dt": 0.01, "t_end": 40, "record_every": 10},
  "run": {"kind": "law", "law": {"law": "instantaneous_mill", "R_target": "solve", "horizon": 0.1,
          "lambda1": 0.1, "lambda2": 0.1, "box": 1}},
  "target_radius": {"ring": "mill", "R": "solve"},
  "checks": [
    {"metric": "final_ang_momentum", "comparator": ">", "value": 0.98},
    {"metric": "radius_error_rel", "comparator": "<", "value": 0.05}
  ]
})json";

const char* kMill2Flock = R"json({
  "description": "Instantaneous per-agent flock control from a mill, N = 20 (control box 2)",
  "seed": 1,
  "potential": {"family": "power_law", "a": 4, "b": 1},
  "params": {"alpha": 10, "beta": 3, "M": 10, "N": 20},
  "init": {"kind": "ring", "ring": "mill", "R": "solve"},
  "sim": {"dt": 0.01, "t_end": 40, "record_every": 10},
  "run": {"kind": "pipeline", "pipeline": "mill_to_flock", "vbar": [1.8257418583505538, 0], "R_f": "solve",
          "instantaneous": {"horizon": 0.1, "lambda": 0.1, "box": 2}, "options": {"phase_cap": 40}},
  "checks": [
    {"metric": "final_polarization", "comparator": ">", "value": 0.99}
  ]
})json";

const char* kBlowup = R"json({
  "description": "Fictitious-repulsion blow-up of five agents to pairwise distance 10",
  "seed": 11,
  "potential": {"family": "power_law", "a": 0.5, "b": 0.25},
  "params": {"alpha": 2, "beta": 1.5, "M": 2, "N": 5},
  "init": {"kind": "random", "box_lo": [-1, -1], "box_hi": [1, 1], "speed_disk": 0.5},
  "sim": {"dt": 0.01, "t_end": 0, "record_every": 100},
  "run": {"kind": "pipeline", "pipeline": "blowup", "eta": 0.2, "L": 10, "jq_cap": 100},
  "checks": [
    {"metric": "final_min_distance", "comparator": ">", "value": 10},
    {"metric": "final_max_speed", "comparator": "<", "value": 1e-3}
  ]
})json";

const char* kRing = R"json({
  "description": "Blow-up, circular equidistributed placement and radius shrink to a translating flock ring",
  "seed": 11,
  "potential": {"family": "power_law", "a": 0.5, "b": 0.25},
  "params": {"alpha": 2, "beta": 1.5, "M": 2, "N": 5},
  "init": {"kind": "random", "box_lo": [-1, -1], "box_hi": [1, 1], "speed_disk": 0.5},
  "sim": {"dt": 0.01, "t_end": 0, "record_every": 100},
  "run": {"kind": "chain", "steps": [
    {"pipeline": "blowup", "eta": 0.2, "L": 5, "jq_cap": 100},
    {"pipeline": "placement", "R": "auto", "L": 5},
    {"pipeline": "shrink", "ring": "flock", "R_to": 10, "duration": 200, "vbar": [1.1547005383792515, 0]}
  ]},
  "checks": [
    {"metric": "final_polarization", "comparator": ">", "value": 0.999},
    {"metric": "final_speed_dev", "comparator": "<", "value": 1e-2},
    {"metric": "final_mean_radius", "comparator": "near", "value": 10, "tolerance": 1e-2}
  ]
})json";

Scenario make(const char* name, double budget, const char* text)
{
  Scenario s;
  s.name = name;
  s.wall_budget_s = budget;
  s.config = Json::parse(text);
  s.description = s.config.at("description").get<std::string>();
  return s;
}

Scenario with_sweep(Scenario s, const char* name, const char* description, const char* key, Json values)
{
  s.name = name;
  s.description = description;
  s.config["description"] = description;
  s.config["sweep"] = {{"key", key}, {"values", std::move(values)}};
  return s;
}

std::vector<Scenario> build_registry()
{
  std::vector<Scenario> r;
  r.push_back(make("fig-step11", 300, kStep11));
  r.push_back(make("fig-quasi", 300, kQuasi));
  const Scenario mill = make("fig-mill1", 60, kMill1);
  r.push_back(mill);
  r.push_back(with_sweep(mill, "fig-mill1-R0", "Mill ring started off the solved radius", "init.R_offset",
                         Json::array({-0.1, -0.05, 0.05, 0.1})));
  r.push_back(with_sweep(mill, "fig-mill1-gamma0", "Mill ring started with tilted velocities", "init.gamma0",
                         Json::array({0.1, 0.2, 0.3})));
  r.back().wall_budget_s = r[r.size() - 2].wall_budget_s = 200;
  r.push_back(make("fig-instcont", 60, kInstcont));
  r.push_back(make("fig-mill2flock", 60, kMill2Flock));
  r.push_back(make("thm2-blowup", 60, kBlowup));
  r.push_back(make("thm2-ring", 120, kRing));
  return r;
}

// ---------------------------------------------------------------- runs

double min_pair_distance(const Points& x)
{
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    for (Eigen::Index j = i + 1; j < x.cols(); ++j) best = std::min(best, (x.col(i) - x.col(j)).norm());
  return best;
}

std::optional<double> parse_target(const Json& cfg, const RadialPotential& pot, const ModelParams& params)
{
  if (!cfg.contains("target_radius")) return std::nullopt;
  Record r(cfg.at("target_radius"), "target_radius");
  const std::string ring = r.string("ring");
  const RingKind k = ring == "mill" ? RingKind::Mill : ring == "flock" ? RingKind::Flock : throw ConfigError("target_radius.ring: mill or flock");
  const double R = parse_radius(r.raw("R"), pot, params, k);
  r.finish();
  return R;
}

Trajectory run_pipeline(const Json& j, const RadialPotential& pot, const ModelParams& params, const SwarmState& init,
                        SimConfig sim)
{
  Record r(j, "pipeline");
  const std::string name = r.string("pipeline");
  if (r.has("duration")) sim.t_end = init.t + r.number("duration");
  const PipelineOptions opts =
      r.has("options") ? parse_pipeline_options(r.raw("options"), sim) : parse_pipeline_options(Json::object(), sim);
  const double s = params.cruise_speed();
  Trajectory traj;

  if (name == "flock") {
    const Vec2 vbar = r.vec2("vbar", Vec2(s, 0.0));
    const double eps = r.number("eps", 1e-2);
    r.finish();
    traj = flock_pipeline(init, pot, params, vbar, eps, opts);
  } else if (name == "mill") {
    const double eps = r.number("eps", 1e-2);
    if (const Json* cl = r.optional("clusters")) {
      std::vector<MillCluster> clusters;
      for (const Json& c : *cl) {
        Record cr(c, "cluster");
        MillCluster m;
        for (const Json& a : cr.raw("agents")) m.agents.push_back(a.get<Eigen::Index>());
        m.center = cr.vec2("center");
        m.R = cr.number("R");
        cr.finish();
        clusters.push_back(std::move(m));
      }
      r.finish();
      traj = mill_pipeline(init, pot, params, clusters, eps, opts);
    } else {
      const Vec2 c = r.vec2("center", Vec2::Zero());
      const double R = parse_radius(r.raw("R"), pot, params, RingKind::Mill);
      r.finish();
      traj = mill_pipeline(init, pot, params, c, R, eps, opts);
    }
  } else if (name == "flock_to_flock") {
    const Vec2 heading = init.v.rowwise().mean();
    const double th = std::atan2(heading.y(), heading.x());
    QuasiStaticPlan q;
    q.theta0 = 0.0;
    q.thetaT = std::remainder(r.number("thetaT") - th, 2 * kPi);
    q.T = r.number("T");
    q.v0 = s * Vec2(std::cos(th), std::sin(th));
    q.t0 = init.t;
    const double env = r.number("envelope", 1.0);
    r.finish();
    traj = flock_to_flock(init, pot, params, q, opts, env);
  } else if (name == "mill_to_flock") {
    const Vec2 vbar = r.vec2("vbar", Vec2(s, 0.0));
    const double Rf = parse_radius(r.raw("R_f"), pot, params, RingKind::Flock);
    InstantaneousSpec spec = r.has("instantaneous") ? parse_instantaneous(r.raw("instantaneous")) : InstantaneousSpec{};
    r.finish();
    traj = mill_to_flock(init, pot, params, vbar, Rf, spec, opts);
  } else if (name == "blowup") {
    BlowupOptions b;
    const double eta = r.number("eta");
    const double L = r.number("L");
    b.jq_cap = r.number("jq_cap", b.jq_cap);
    b.R0 = r.number("R0", b.R0);
    r.finish();
    traj = blowup_pipeline(init, pot, params, eta, L, opts, b).trajectory;
  } else if (name == "placement") {
    const double L = r.number("L");
    double R = 0.0;
    const Json& rj = r.raw("R");
    r.finish();
    if (rj.is_string() && rj.get<std::string>() == "auto") {
      const Vec2 c = placement_center(init.x, sim.seed);
      const double th = min_angular_separation(init.x, c);
      R = 1.5 * L / std::sin(std::min(th, kPi / 2));
    } else if (rj.is_number()) {
      R = rj.get<double>();
    } else {
      throw ConfigError("placement.R: a number or \"auto\"");
    }
    traj = circular_placement(init, pot, params, R, L, opts).trajectory;
  } else if (name == "shrink") {
    const std::string ring = r.string("ring");
    const RingKind k = ring == "mill" ? RingKind::Mill : ring == "flock" ? RingKind::Flock : throw ConfigError("shrink.ring: mill or flock");
    const Vec2 c = r.has("center") ? r.vec2("center") : Vec2(init.x.rowwise().mean());
    const double R_from = r.has("R_from") ? r.number("R_from") : (init.x.colwise() - c).colwise().norm().mean();
    const double R_to = parse_radius(r.raw("R_to"), pot, params, k);
    const double dur = r.number("duration");
    const Vec2 vbar = r.vec2("vbar", Vec2::Zero());
    r.finish();
    traj = radius_shrink(init, pot, params, k, c, R_from, R_to, dur, opts, vbar);
  } else {
    throw ConfigError("unknown pipeline '" + name + "'");
  }
  return traj;
}

}  // namespace

const std::vector<Scenario>& scenario_registry()
{
  static const std::vector<Scenario> reg = build_registry();
  return reg;
}

const Scenario& find_scenario(const std::string& name)
{
  for (const auto& s : scenario_registry())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

Scenario load_scenario_file(const std::filesystem::path& file)
{
  std::ifstream f(file);
  if (!f) throw ConfigError("cannot read " + file.string());
  Scenario s;
  try {
    s.config = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  if (!s.config.is_object()) throw ConfigError(file.string() + ": expected an object");
  s.name = s.config.value("name", file.stem().string());
  s.description = s.config.value("description", "");
  s.wall_budget_s = s.config.value("wall_budget_s", 60.0);
  s.config.erase("name");
  s.config.erase("wall_budget_s");
  return s;
}

Trajectory execute_run(const Json& run, const RadialPotential& pot, const ModelParams& params, const SwarmState& init,
                       const SimConfig& sim)
{
  if (!run.is_object() || !run.contains("kind")) throw ConfigError("run: expected {\"kind\": ...}");
  const std::string kind = run.at("kind").get<std::string>();
  if (kind == "law") {
    Record r(run, "run");
    r.string("kind");
    const ControlLaw law = parse_law(r.raw("law"), pot, params, sim, init);
    r.finish();
    return simulate(init, pot, params, law, sim);
  }
  if (kind == "plan") {
    Record r(run, "run");
    r.string("kind");
    const PhasePlan plan = parse_plan(r.raw("phases"), pot, params, sim);
    r.finish();
    return run_plan(init, pot, params, plan, sim);
  }
  if (kind == "pipeline") {
    Json body = run;
    body.erase("kind");
    return run_pipeline(body, pot, params, init, sim);
  }
  if (kind == "chain") {
    Record r(run, "run");
    r.string("kind");
    const Json& steps = r.raw("steps");
    r.finish();
    if (!steps.is_array() || steps.empty()) throw ConfigError("run.steps: expected a nonempty list");
    Trajectory traj;
    SwarmState cur = init;
    for (const Json& st : steps) {
      traj.append(run_pipeline(st, pot, params, cur, sim));
      cur = traj.final_state();
    }
    return traj;
  }
  throw ConfigError("run: unknown kind '" + kind + "'");
}

Json trajectory_metrics(const Trajectory& traj, const RadialPotential& pot, const ModelParams& params,
                        const SimConfig& sim, std::optional<double> target_radius)
{
  Json m;
  const SwarmState& f = traj.final_state();
  const SwarmState& i0 = traj.states.front();
  const Points F = interaction_forces(pot, f.x, sim.guard);
  const auto op = order_parameters(f);
  const double s = params.cruise_speed();
  const Vec2 mv = f.v.rowwise().mean();

  m["final_t"] = f.t;
  m["final_max_speed"] = f.v.colwise().norm().maxCoeff();
  m["final_max_force"] = F.colwise().norm().maxCoeff();
  m["final_polarization"] = op.polarization;
  m["final_ang_momentum"] = op.ang_momentum;
  m["final_mean_radius"] = op.mean_radius;
  m["final_mean_speed"] = op.mean_speed;
  m["final_speed_dev"] = (f.v.colwise().norm().array() - s).abs().maxCoeff();
  m["final_min_distance"] = min_pair_distance(f.x);
  m["final_mean_angle"] = std::atan2(mv.y(), mv.x());

  double umax = 0.0, ureq = 0.0;
  std::size_t sat = 0;
  for (std::size_t k = 0; k < traj.step_u_max.size(); ++k) {
    umax = std::max(umax, traj.step_u_max[k]);
    ureq = std::max(ureq, traj.step_u_request[k]);
    if (traj.step_u_request[k] > params.M) ++sat;
  }
  m["max_control"] = umax;
  m["max_request"] = ureq;
  m["saturation_fraction"] =
      traj.step_u_max.empty() ? 0.0 : static_cast<double>(sat) / static_cast<double>(traj.step_u_max.size());

  int violations = 0;
  for (std::size_t k = 1; k < traj.energy.size(); ++k) {
    const double prev = traj.energy[k - 1];
    if (traj.energy[k] > prev + 10 * sim.dt * sim.dt * std::max(1.0, std::abs(prev))) ++violations;
  }
  m["energy_violations"] = violations;

  const Points rel0 = i0.x.colwise() - i0.x.rowwise().mean();
  const Points rel = f.x.colwise() - f.x.rowwise().mean();
  m["relative_position_drift"] = (rel - rel0).colwise().norm().maxCoeff();

  const MillDiagnostics md = mill_diagnostics(f, params, target_radius);
  m["mill_radius_dev"] = md.radius_dev;
  m["mill_gamma"] = md.gamma_mean;
  m["mill_speed_dev"] = md.speed_dev;
  if (target_radius) {
    m["target_radius"] = *target_radius;
    m["radius_error"] = std::abs(op.mean_radius - *target_radius);
    m["radius_error_rel"] = std::abs(op.mean_radius - *target_radius) / *target_radius;
  }
  return m;
}

Check parse_check(const Json& j)
{
  Record r(j, "check");
  Check c;
  c.metric = r.string("metric");
  c.comparator = r.string("comparator");
  c.value = r.number("value");
  c.tolerance = r.number("tolerance", 0.0);
  r.finish();
  static const std::vector<std::string> ok{"<", "<=", ">", ">=", "==", "near"};
  if (std::find(ok.begin(), ok.end(), c.comparator) == ok.end())
    throw ConfigError("check: unknown comparator '" + c.comparator + "'");
  return c;
}

bool evaluate_check(const Check& c, double a)
{
  if (std::isnan(a)) return false;
  if (c.comparator == "<") return a < c.value;
  if (c.comparator == "<=") return a <= c.value;
  if (c.comparator == ">") return a > c.value;
  if (c.comparator == ">=") return a >= c.value;
  if (c.comparator == "==") return a == c.value;
  return std::abs(a - c.value) <= c.tolerance;
}

bool ScenarioResult::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string ScenarioResult::first_failure() const
{
  for (const auto& c : checks)
    if (!c.pass) {
      std::ostringstream os;
      os << c.check.metric << ' ' << c.check.comparator << ' ' << format_number(c.check.value);
      if (c.check.comparator == "near") os << " +- " << format_number(c.check.tolerance);
      os << " (actual " << format_number(c.actual) << (c.variant.empty() ? "" : ", variant " + c.variant) << ')';
      return os.str();
    }
  return {};
}

ScenarioResult run_scenario(const Scenario& sc, const RunOptions& opts)
{
  if (opts.format != "csv" && opts.format != "json") throw ConfigError("format must be csv or json");
  Record top(sc.config, sc.name);
  top.optional("description");
  const std::uint64_t seed = opts.seed ? *opts.seed : top.u64("seed", 0);
  if (opts.seed) top.optional("seed");
  const Json base_pot = top.raw("potential");
  const Json base_params = top.raw("params");
  const Json base_init = top.raw("init");
  const Json base_sim = top.has("sim") ? top.raw("sim") : Json::object();
  const Json base_run = top.raw("run");
  const Json* unc = top.optional("compare_uncontrolled");
  const Json* sweep = top.optional("sweep");
  const Json* target = top.optional("target_radius");
  std::vector<Check> checks;
  if (const Json* cj = top.optional("checks"))
    for (const Json& c : *cj) checks.push_back(parse_check(c));
  top.finish();

  // variants: the base config, or one per sweep value
  std::vector<std::pair<std::string, Json>> variants;
  Json whole = sc.config;
  if (sweep) {
    Record sr(*sweep, "sweep");
    const std::string key = sr.string("key");
    const Json& values = sr.raw("values");
    sr.finish();
    if (!values.is_array() || values.empty()) throw ConfigError("sweep.values: expected a nonempty list");
    for (const Json& v : values) {
      Json cfg = whole;
      set_by_path(cfg, key, v);
      variants.emplace_back(key + "=" + v.dump(), cfg);
    }
  } else {
    variants.emplace_back("", whole);
  }

  ScenarioResult res;
  res.name = sc.name;
  res.seed = seed;
  res.dir = opts.out / sc.name / ("seed-" + std::to_string(seed));

  Json summary;
  summary["scenario"] = sc.name;
  summary["description"] = sc.description;
  summary["seed"] = seed;
  summary["variants"] = Json::array();

  for (auto& [label, cfg] : variants) {
    const RadialPotential pot = parse_potential(cfg.at("potential"));
    const ModelParams params = parse_params(cfg.at("params"));
    SimConfig sim = parse_sim(cfg.contains("sim") ? cfg.at("sim") : Json::object());
    sim.seed = seed;
    if (opts.dt) sim.dt = *opts.dt;
    if (opts.t_end) sim.t_end = *opts.t_end;
    const SwarmState init = make_initial(cfg.at("init"), pot, params, seed);
    const std::optional<double> R_target = target ? parse_target(cfg, pot, params) : std::nullopt;

    VariantResult vr;
    vr.label = label;
    vr.trajectory = execute_run(cfg.at("run"), pot, params, init, sim);
    vr.metrics = trajectory_metrics(vr.trajectory, pot, params, sim, R_target);

    if (cfg.at("run").contains("thetaT")) {
      const double err = std::remainder(vr.metrics.at("final_mean_angle").get<double>() - cfg.at("run").at("thetaT").get<double>(), 2 * kPi);
      vr.metrics["final_angle_error"] = std::abs(err);
    }

    std::optional<Trajectory> free_run;
    if (unc) {
      Record ur(*unc, "compare_uncontrolled");
      SimConfig us = sim;
      us.t_end = ur.number("t_end", sim.t_end);
      ur.finish();
      free_run = simulate(init, pot, params, zero_control(), us);
      const SwarmState& uf = free_run->final_state();
      vr.metrics["uncontrolled_mean_speed"] = uf.v.colwise().norm().mean();
      vr.metrics["uncontrolled_final_energy"] = free_run->energy.back();
    }

    for (const Check& c : checks) {
      CheckResult cr;
      cr.check = c;
      cr.variant = label;
      if (!vr.metrics.contains(c.metric)) throw ConfigError("check references unknown metric '" + c.metric + "'");
      const Json& mv = vr.metrics.at(c.metric);
      cr.actual = mv.is_number() ? mv.get<double>() : std::nan("");
      cr.pass = evaluate_check(c, cr.actual);
      res.checks.push_back(cr);
    }

    Json vj;
    vj["label"] = label;
    vj["potential"] = to_json(pot);
    vj["params"] = to_json(params);
    vj["metrics"] = vr.metrics;
    vj["phases"] = phases_json(vr.trajectory);
    vj["warnings"] = vr.trajectory.warnings;
    summary["variants"].push_back(vj);

    if (opts.write) {
      std::string sub = label;
      std::replace_if(sub.begin(), sub.end(), [](char ch) { return !(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_' || ch == '='); }, '_');
      const auto vdir = label.empty() ? res.dir : res.dir / sub;
      std::filesystem::create_directories(vdir);
      if (opts.format == "csv") {
        std::ofstream f(vdir / "trajectory.csv", std::ios::binary);
        write_trajectory_csv(f, vr.trajectory);
      } else {
        Json tj = Json::array();
        for (std::size_t k = 0; k < vr.trajectory.states.size(); ++k) {
          const auto& st = vr.trajectory.states[k];
          const auto& u = vr.trajectory.controls[k];
          Json row;
          row["t"] = st.t;
          for (const char* key : {"x", "v", "u"}) row[key] = Json::array();
          for (Eigen::Index i = 0; i < st.size(); ++i) {
            row["x"].push_back({st.x(0, i), st.x(1, i)});
            row["v"].push_back({st.v(0, i), st.v(1, i)});
            row["u"].push_back({u(0, i), u(1, i)});
          }
          tj.push_back(row);
        }
        write_text(vdir / "trajectory.json", tj.dump() + "\n");
      }
      const SeriesTable st = series(vr.trajectory, pot);
      {
        std::ofstream f(vdir / "series.csv", std::ios::binary);
        write_series_csv(f, st);
      }
      if (opts.plots) {
        write_plots(vdir / "plots", vr.trajectory, st);
        if (free_run) {
          write_text(vdir / "plots" / "energy.svg",
                     svg_line_chart({"Energy", "t", "V"},
                                    {{"controlled", st.t, st.energy}, {"uncontrolled", free_run->times, free_run->energy}}));
        }
      }
    }
    vr.overrides = cfg;
    res.variants.push_back(std::move(vr));
  }

  Json cj = Json::array();
  for (const auto& c : res.checks)
    cj.push_back({{"metric", c.check.metric},
                  {"comparator", c.check.comparator},
                  {"value", c.check.value},
                  {"tolerance", c.check.tolerance},
                  {"variant", c.variant},
                  {"actual", c.actual},
                  {"pass", c.pass}});
  summary["checks"] = cj;
  summary["passed"] = res.passed();
  res.summary = summary;
  if (opts.write) {
    std::filesystem::create_directories(res.dir);
    write_text(res.dir / "summary.json", summary.dump(2) + "\n");
  }
  return res;
}

}  // namespace swarm
