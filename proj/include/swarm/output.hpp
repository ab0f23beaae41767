#pragma once

// Trajectory CSV, summary JSON and SVG line/scatter charts.
//
// Numbers are written with std::to_chars in shortest round-trip form, so a
// given trajectory always serialises to the same bytes.

#include "swarm/config.hpp"
#include "swarm/dynamics.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace swarm {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_number(double v);

/// Header t,agent,x1,x2,v1,v2,u1,u2; one row per recorded sample and agent.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Per-sample scalars: t, energy, max|v|, max|F|, polarization,
/// ang_momentum, mean_radius, max|u|.
struct SeriesTable {
  std::vector<double> t, energy, max_speed, max_force, polarization, ang_momentum, mean_radius, max_control;
};
SeriesTable series(const Trajectory& traj, const RadialPotential& pot);

void write_series_csv(std::ostream& os, const SeriesTable& s);

Json phases_json(const Trajectory& traj);

struct Line {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;
};

/// 640x400 viewBox; data mapped linearly (or log10 in y) onto a 560x320 plot area.
std::string svg_line_chart(const ChartSpec& spec, const std::vector<Line>& lines);

/// Agent positions of each state as dots (one colour per state), equal axis scaling.
std::string svg_scatter(const std::string& title, const std::vector<SwarmState>& states,
                        const std::vector<std::string>& labels);

/// energy.svg, speed_force.svg, snapshots.svg, radius.svg, control.svg.
void write_plots(const std::filesystem::path& dir, const Trajectory& traj, const SeriesTable& s);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace swarm
