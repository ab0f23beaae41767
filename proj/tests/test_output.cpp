#include "swarm/output.hpp"
#include "swarm/random.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <vector>

using namespace swarm;

namespace {

// Checks tag nesting of generated SVG: every opened element is closed in order.
bool well_formed(const std::string& xml)
{
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    const std::string name = tag.substr(tag[0] == '/' ? 1 : 0, tag.find_first_of(" \t\n", 0) - (tag[0] == '/' ? 1 : 0));
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

Trajectory small_run()
{
  RandomInit ri;
  ri.N = 4;
  ri.speed_disk = 0.5;
  ri.seed = 3;
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 1.0;
  cfg.record_every = 4;
  return simulate(random_state(ri), PowerLaw{4, 1}, ModelParams{2, 1.5, 2, 4}, flock_hold(), cfg);
}

}  // namespace

TEST_CASE("numbers round-trip exactly")
{
  SplitMix64 rng(71);
  for (int k = 0; k < 5000; ++k) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-30, 30));
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("trajectory CSV layout")
{
  const Trajectory tr = small_run();
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,agent,x1,x2,v1,v2,u1,u2");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
  }
  CHECK(rows == tr.states.size() * 4);
}

TEST_CASE("series table follows the samples")
{
  const Trajectory tr = small_run();
  const SeriesTable s = series(tr, PowerLaw{4, 1});
  CHECK(s.t == tr.times);
  CHECK(s.energy.size() == tr.times.size());
  std::ostringstream os;
  write_series_csv(os, s);
  CHECK(os.str().rfind("t,", 0) == 0);
  const Json ph = phases_json(tr);
  CHECK(ph.is_array());
}

TEST_CASE("SVG charts are well formed")
{
  const std::vector<Line> lines{{"a", {0, 1, 2}, {1, 1e-3, 1e-6}}, {"b & c", {0, 2}, {0.5, 0.0}}};
  for (bool log_y : {false, true}) {
    const std::string svg = svg_line_chart({"title <x>", "t", "y", log_y}, lines);
    CHECK(svg.find("viewBox=\"0 0 640 400\"") != std::string::npos);
    CHECK(svg.find("<x>") == std::string::npos);
    CHECK(well_formed(svg));
  }
  CHECK(well_formed(svg_line_chart({"empty", "t", "y", false}, {})));
  const Trajectory tr = small_run();
  const std::string sc = svg_scatter("snap", {tr.states.front(), tr.final_state()}, {"start", "end"});
  CHECK(well_formed(sc));
  CHECK(sc.find("<circle") != std::string::npos);
}
