#include "swarm/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace swarm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("registry names are unique and resolvable")
{
  std::set<std::string> names;
  for (const Scenario& s : scenario_registry()) {
    CHECK(names.insert(s.name).second);
    CHECK(find_scenario(s.name).name == s.name);
    CHECK(s.wall_budget_s > 0);
    CHECK(s.config.contains("checks"));
  }
  CHECK(names.size() == 9);
  CHECK_THROWS_AS(find_scenario("no-such-scenario"), ConfigError);
}

TEST_CASE("check comparators")
{
  CHECK(evaluate_check({"m", "<", 1.0, 0}, 0.5));
  CHECK_FALSE(evaluate_check({"m", "<", 1.0, 0}, 1.0));
  CHECK(evaluate_check({"m", "<=", 1.0, 0}, 1.0));
  CHECK(evaluate_check({"m", ">", 1.0, 0}, 2.0));
  CHECK(evaluate_check({"m", ">=", 1.0, 0}, 1.0));
  CHECK(evaluate_check({"m", "==", 0.0, 0}, 0.0));
  CHECK(evaluate_check({"m", "near", 10.0, 0.1}, 10.05));
  CHECK_FALSE(evaluate_check({"m", "near", 10.0, 0.1}, 10.2));
  CHECK_FALSE(evaluate_check({"m", "<", 1.0, 0}, std::nan("")));
  CHECK_THROWS_AS(parse_check(Json::parse(R"({"metric": "m", "comparator": "~", "value": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_check(Json::parse(R"({"metric": "m", "comparator": "<", "value": 1, "x": 0})")), ConfigError);
}

TEST_CASE("a short scenario writes identical artifacts on rerun")
{
  const fs::path root = fs::temp_directory_path() / "swarm-scenario-test";
  fs::remove_all(root);
  RunOptions o;
  o.out = root / "a";
  const ScenarioResult a = run_scenario(find_scenario("thm2-blowup"), o);
  o.out = root / "b";
  const ScenarioResult b = run_scenario(find_scenario("thm2-blowup"), o);
  CHECK(a.passed());
  CHECK(a.first_failure().empty());
  for (const char* f : {"trajectory.csv", "series.csv", "summary.json", "plots/energy.svg", "plots/snapshots.svg"}) {
    CAPTURE(f);
    const fs::path pa = root / "a" / "thm2-blowup" / "seed-11" / f;
    REQUIRE(fs::exists(pa));
    CHECK(slurp(pa) == slurp(root / "b" / "thm2-blowup" / "seed-11" / f));
  }
  fs::remove_all(root);
}

TEST_CASE("scenario files use the registry layout")
{
  const fs::path file = fs::temp_directory_path() / "swarm-scenario-file.json";
  {
    std::ofstream f(file);
    f << R"({"name": "tiny", "description": "free cruise",
             "potential": {"family": "none"}, "params": {"alpha": 2, "beta": 1.5, "M": 1, "N": 3},
             "init": {"kind": "random", "box_lo": [-1, -1], "box_hi": [1, 1], "speed_disk": 1},
             "sim": {"dt": 0.01, "t_end": 20, "record_every": 100},
             "run": {"kind": "law", "law": {"law": "none"}},
             "checks": [{"metric": "final_speed_dev", "comparator": "<", "value": 1e-6},
                        {"metric": "final_max_speed", "comparator": ">", "value": 5}]})";
  }
  const Scenario sc = load_scenario_file(file);
  CHECK(sc.name == "tiny");
  RunOptions o;
  o.write = false;
  const ScenarioResult r = run_scenario(sc, o);
  REQUIRE(r.checks.size() == 2);
  CHECK(r.checks[0].pass);
  CHECK_FALSE(r.checks[1].pass);
  CHECK(r.first_failure().find("final_max_speed") != std::string::npos);

  {
    std::ofstream f(file);
    f << R"({"name": "bad", "potential": {"family": "none"}, "paramz": {}})";
  }
  CHECK_THROWS_AS(run_scenario(load_scenario_file(file), o), ConfigError);
  fs::remove(file);
}
