// swarmctl: command-line front end for simulations, analysis and scenarios.

#include "swarm/analysis.hpp"
#include "swarm/config.hpp"
#include "swarm/model.hpp"
#include "swarm/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace swarm;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

struct Common {
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string format = "csv";
  std::string plots = "on";
};

void add_common(CLI::App* app, Common& c)
{
  app->add_option("--out", c.out, "Output directory (SWARMCTL_OUT overrides)");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--dt", c.dt, "Integration step");
  app->add_option("--t-end", c.t_end, "End time");
  app->add_option("--format", c.format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--plots", c.plots, "Write SVG plots")->check(CLI::IsMember({"on", "off"}));
}

RunOptions run_options(const Common& c)
{
  RunOptions o;
  o.seed = c.seed;
  o.dt = c.dt;
  o.t_end = c.t_end;
  o.out = c.out;
  if (const char* env = std::getenv("SWARMCTL_OUT"); env && *env) o.out = env;
  o.format = c.format;
  o.plots = c.plots == "on";
  return o;
}

Json read_json(const std::string& path)
{
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Scenario resolve(const std::string& name_or_file)
{
  if (std::filesystem::exists(name_or_file)) return load_scenario_file(name_or_file);
  return find_scenario(name_or_file);
}

int report(const ScenarioResult& r, double seconds)
{
  for (const auto& c : r.checks)
    std::cout << (c.pass ? "  ok    " : "  FAIL  ") << c.check.metric << ' ' << c.check.comparator << ' '
              << format_number(c.check.value) << "  actual " << format_number(c.actual)
              << (c.variant.empty() ? "" : "  [" + c.variant + "]") << '\n';
  std::cout << r.name << " seed " << r.seed << ": " << (r.passed() ? "passed" : "FAILED") << " in "
            << std::fixed << std::setprecision(1) << seconds << " s, artifacts in " << r.dir.string() << '\n';
  if (!r.passed()) {
    std::cerr << "first failed check: " << r.first_failure() << '\n';
    return kCheckFailed;
  }
  return kOk;
}

int run_and_report(const Scenario& sc, const RunOptions& o)
{
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioResult r = run_scenario(sc, o);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report(r, s);
}

Json analyze(const RadialPotential& pot, const ModelParams& params, int N)
{
  Json out;
  out["potential"] = to_json(pot);
  out["params"] = to_json(params);
  out["N"] = N;
  out["cruise_speed"] = params.cruise_speed();
  out["M_alpha_beta"] = threshold_M_alpha_beta(params);
  const ForceBounds fb = force_bounds(pot, 1.0, N);
  auto num = [](double v) { return is_unbounded(v) ? Json("unbounded") : Json(v); };
  out["M_F"] = num(fb.M_F);
  out["tilde_M_F"] = num(fb.tilde_M_F);

  Json flocks = Json::array();
  for (double R : mill_radius_scan(pot, params, N, RingKind::Flock)) flocks.push_back(R);
  out["flock_ring_radii"] = flocks;

  Json mills = Json::array();
  for (double R : mill_radius_scan(pot, params, N, RingKind::Mill)) {
    const Eigen::Matrix3d A = mill_linearization_matrix(pot, params, N, R);
    const CubicCoefficients c = characteristic_coefficients(A);
    const RouthHurwitz rh = routh_hurwitz_stable(c.a2, c.a1, c.a0);
    Json m;
    m["R"] = R;
    m["phi0"] = phi_of_r(pot, N, R, 0.0);
    m["phi_prime0"] = phi_prime(pot, N, R);
    m["coefficients"] = {c.a2, c.a1, c.a0};
    m["stable"] = rh.stable;
    Json ev = Json::array();
    for (const auto& z : cubic_roots(c)) ev.push_back({z.real(), z.imag()});
    m["eigenvalues"] = ev;
    mills.push_back(m);
  }
  out["mills"] = mills;
  return out;
}

int dispatch(int argc, char** argv)
{
  CLI::App app{"Self-propelled swarm simulation and control"};
  app.require_subcommand(1);

  Common sim_c, man_c, run_c, sweep_c;
  std::string sim_cfg;
  auto* simulate = app.add_subcommand("simulate", "Run a configuration file");
  simulate->add_option("config", sim_cfg, "Scenario-style JSON file")->required();
  add_common(simulate, sim_c);

  std::string an_cfg;
  int an_N = 0;
  std::string an_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "Ring radii and mill stability report");
  analyze_cmd->add_option("config", an_cfg, "JSON with potential and params")->required();
  analyze_cmd->add_option("--N", an_N, "Agent count (defaults to params.N)");
  analyze_cmd->add_option("--out", an_out, "Also write analyze.json here");

  std::string plan_file, man_cfg;
  auto* maneuver = app.add_subcommand("maneuver", "Run a phase plan");
  maneuver->add_option("plan", plan_file, "JSON list of phases")->required();
  maneuver->add_option("--config", man_cfg, "JSON with potential, params, init and sim")->required();
  add_common(maneuver, man_c);

  auto* scenario = app.add_subcommand("scenario", "Registry scenarios");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "List registry scenarios");
  std::string show_name;
  auto* show = scenario->add_subcommand("show", "Print a scenario in file layout");
  show->add_option("name", show_name, "Registry name or JSON file")->required();
  std::string run_name;
  auto* run = scenario->add_subcommand("run", "Run a scenario by name or file");
  run->add_option("name", run_name, "Registry name or JSON file")->required();
  add_common(run, run_c);

  std::string sweep_name, sweep_key;
  std::vector<std::string> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "Terminal metrics over a grid of one config key");
  sweep->add_option("name", sweep_name, "Registry name or JSON file")->required();
  sweep->add_option("--key", sweep_key, "Dotted config path, e.g. params.M")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
  add_common(sweep, sweep_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (simulate->parsed()) {
    Scenario sc = load_scenario_file(sim_cfg);
    return run_and_report(sc, run_options(sim_c));
  }
  if (analyze_cmd->parsed()) {
    const Json cfg = read_json(an_cfg);
    Record r(cfg, "analyze");
    const RadialPotential pot = parse_potential(r.raw("potential"));
    const ModelParams params = parse_params(r.raw("params"));
    r.finish();
    const Json rep = analyze(pot, params, an_N > 0 ? an_N : params.N);
    std::cout << rep.dump(2) << '\n';
    if (!an_out.empty()) {
      std::filesystem::create_directories(an_out);
      write_text(std::filesystem::path(an_out) / "analyze.json", rep.dump(2) + "\n");
    }
    return kOk;
  }
  if (maneuver->parsed()) {
    Scenario sc;
    sc.config = read_json(man_cfg);
    sc.name = sc.config.value("name", std::filesystem::path(plan_file).stem().string());
    sc.config.erase("name");
    if (sc.config.contains("run")) throw ConfigError("maneuver config must not contain a run record");
    sc.config["run"] = {{"kind", "plan"}, {"phases", read_json(plan_file)}};
    return run_and_report(sc, run_options(man_c));
  }
  if (list->parsed()) {
    for (const auto& s : scenario_registry())
      std::cout << std::left << std::setw(18) << s.name << ' ' << std::setw(6) << s.wall_budget_s << "s  "
                << s.description << '\n';
    return kOk;
  }
  if (show->parsed()) {
    const Scenario sc = resolve(show_name);
    Json j = sc.config;
    j["name"] = sc.name;
    j["description"] = sc.description;
    j["wall_budget_s"] = sc.wall_budget_s;
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  if (run->parsed()) return run_and_report(resolve(run_name), run_options(run_c));
  if (sweep->parsed()) {
    const Scenario base = resolve(sweep_name);
    RunOptions o = run_options(sweep_c);
    std::ostringstream csv;
    std::vector<std::string> cols;
    bool failed = false;
    for (const std::string& v : sweep_values) {
      Scenario sc = base;
      Json value;
      try {
        value = Json::parse(v);
      } catch (const nlohmann::json::parse_error&) {
        value = v;
      }
      set_by_path(sc.config, sweep_key, value);
      sc.config.erase("sweep");
      sc.name = base.name + "-sweep/" + sweep_key + "=" + v;
      const ScenarioResult r = run_scenario(sc, o);
      failed = failed || !r.passed();
      const Json& m = r.variants.front().metrics;
      if (cols.empty()) {
        csv << sweep_key;
        for (const auto& [k, val] : m.items()) {
          (void)val;
          cols.push_back(k);
          csv << ',' << k;
        }
        csv << ",passed\n";
      }
      csv << v;
      for (const auto& k : cols) csv << ',' << (m.contains(k) && m[k].is_number() ? format_number(m[k].get<double>()) : "");
      csv << ',' << (r.passed() ? 1 : 0) << '\n';
    }
    const auto dir = o.out / (base.name + "-sweep");
    std::filesystem::create_directories(dir);
    write_text(dir / "sweep.csv", csv.str());
    std::cout << csv.str();
    return failed ? kCheckFailed : kOk;
  }
  return kConfigError;
}

}  // namespace

int main(int argc, char** argv)
{
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ThresholdError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const SwarmError& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}
