#include "swarm/output.hpp"

#include "swarm/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace swarm {

std::string format_number(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
  os << "t,agent,x1,x2,v1,v2,u1,u2\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const SwarmState& s = traj.states[k];
    const Points& u = traj.controls[k];
    const std::string t = format_number(traj.times[k]);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      os << t << ',' << i << ',' << format_number(s.x(0, i)) << ',' << format_number(s.x(1, i)) << ','
         << format_number(s.v(0, i)) << ',' << format_number(s.v(1, i)) << ',' << format_number(u(0, i)) << ','
         << format_number(u(1, i)) << '\n';
    }
  }
}

SeriesTable series(const Trajectory& traj, const RadialPotential& pot)
{
  SeriesTable s;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const SwarmState& st = traj.states[k];
    s.t.push_back(traj.times[k]);
    s.energy.push_back(traj.energy[k]);
    s.max_speed.push_back(st.v.colwise().norm().maxCoeff());
    s.max_force.push_back(interaction_forces(pot, st.x).colwise().norm().maxCoeff());
    s.polarization.push_back(traj.order[k].polarization);
    s.ang_momentum.push_back(traj.order[k].ang_momentum);
    s.mean_radius.push_back(traj.order[k].mean_radius);
    s.max_control.push_back(traj.max_control[k]);
  }
  return s;
}

void write_series_csv(std::ostream& os, const SeriesTable& s)
{
  os << "t,energy,max_speed,max_force,polarization,ang_momentum,mean_radius,max_control\n";
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    os << format_number(s.t[k]) << ',' << format_number(s.energy[k]) << ',' << format_number(s.max_speed[k]) << ','
       << format_number(s.max_force[k]) << ',' << format_number(s.polarization[k]) << ','
       << format_number(s.ang_momentum[k]) << ',' << format_number(s.mean_radius[k]) << ','
       << format_number(s.max_control[k]) << '\n';
  }
}

Json phases_json(const Trajectory& traj)
{
  Json out = Json::array();
  for (const auto& p : traj.phases)
    out.push_back({{"name", p.name},
                   {"t_start", p.t_start},
                   {"t_end", p.t_end},
                   {"exit", p.exit_reason},
                   {"predicate_met", p.predicate_met}});
  return out;
}

// ---------------------------------------------------------------- SVG

namespace {

constexpr double kW = 640, kH = 400, kLeft = 60, kTop = 40, kPlotW = 560, kPlotH = 320;
const std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string esc(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2)
{
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string tick(double v)
{
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void pad()
  {
    if (!(hi > lo)) {
      const double m = std::abs(lo) > 0 ? std::abs(lo) * 0.1 : 1.0;
      lo -= m;
      hi += m;
    }
  }
};

std::string frame(const std::string& title, const std::string& xlabel, const std::string& ylabel, const Range& xr,
                  const Range& yr, bool log_y)
{
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kW << ' ' << kH << "\" width=\"" << kW
     << "\" height=\"" << kH << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW << "\" height=\"" << kPlotH
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = k / 4.0;
    const double px = kLeft + fx * kPlotW, py = kTop + kPlotH - fx * kPlotH;
    const double xv = xr.lo + fx * (xr.hi - xr.lo);
    double yv = yr.lo + fx * (yr.hi - yr.lo);
    if (log_y) yv = std::pow(10.0, yv);
    os << "<text x=\"" << fixed(px) << "\" y=\"" << kTop + kPlotH + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
       << tick(xv) << "</text>\n";
    os << "<text x=\"" << kLeft - 4 << "\" y=\"" << fixed(py + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
       << tick(yv) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kH - 6 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << esc(xlabel) << "</text>\n";
  os << "<text x=\"14\" y=\"" << kTop + kPlotH / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
     << kTop + kPlotH / 2 << ")\">" << esc(ylabel) << "</text>\n";
  return os.str();
}

}  // namespace

std::string svg_line_chart(const ChartSpec& spec, const std::vector<Line>& lines)
{
  auto ymap = [&](double y) { return spec.log_y ? std::log10(std::max(y, 1e-300)) : y; };
  Range xr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  Range yr = xr;
  for (const auto& l : lines)
    for (std::size_t k = 0; k < l.x.size(); ++k) {
      if (!std::isfinite(l.x[k]) || !std::isfinite(l.y[k])) continue;
      if (spec.log_y && !(l.y[k] > 0)) continue;
      xr.lo = std::min(xr.lo, l.x[k]);
      xr.hi = std::max(xr.hi, l.x[k]);
      yr.lo = std::min(yr.lo, ymap(l.y[k]));
      yr.hi = std::max(yr.hi, ymap(l.y[k]));
    }
  if (!std::isfinite(xr.lo)) xr = {0.0, 1.0};
  if (!std::isfinite(yr.lo)) yr = {0.0, 1.0};
  xr.pad();
  yr.pad();

  std::ostringstream os;
  os << frame(spec.title, spec.xlabel, spec.ylabel, xr, yr, spec.log_y);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto& l = lines[li];
    os << "<polyline fill=\"none\" stroke=\"" << kColors[li % kColors.size()] << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < l.x.size(); ++k) {
      if (!std::isfinite(l.x[k]) || !std::isfinite(l.y[k]) || (spec.log_y && !(l.y[k] > 0))) continue;
      const double px = kLeft + (l.x[k] - xr.lo) / (xr.hi - xr.lo) * kPlotW;
      const double py = kTop + kPlotH - (ymap(l.y[k]) - yr.lo) / (yr.hi - yr.lo) * kPlotH;
      os << (first ? "" : " ") << fixed(px) << ',' << fixed(py);
      first = false;
    }
    os << "\"/>\n";
    os << "<text x=\"" << kLeft + kPlotW - 6 << "\" y=\"" << kTop + 14 + 14 * static_cast<double>(li)
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << kColors[li % kColors.size()] << "\">" << esc(l.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_scatter(const std::string& title, const std::vector<SwarmState>& states,
                        const std::vector<std::string>& labels)
{
  Range xr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  Range yr = xr;
  for (const auto& s : states)
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      xr.lo = std::min(xr.lo, s.x(0, i));
      xr.hi = std::max(xr.hi, s.x(0, i));
      yr.lo = std::min(yr.lo, s.x(1, i));
      yr.hi = std::max(yr.hi, s.x(1, i));
    }
  if (!std::isfinite(xr.lo)) xr = yr = {0.0, 1.0};
  xr.pad();
  yr.pad();
  // equal scaling: widen the narrower axis about its middle
  const double sx = (xr.hi - xr.lo) / kPlotW, sy = (yr.hi - yr.lo) / kPlotH;
  const double sc = std::max(sx, sy) * 1.05;
  const double cx = (xr.lo + xr.hi) / 2, cy = (yr.lo + yr.hi) / 2;
  xr = {cx - sc * kPlotW / 2, cx + sc * kPlotW / 2};
  yr = {cy - sc * kPlotH / 2, cy + sc * kPlotH / 2};

  std::ostringstream os;
  os << frame(title, "x1", "x2", xr, yr, false);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    const char* col = kColors[k % kColors.size()];
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double px = kLeft + (s.x(0, i) - xr.lo) / (xr.hi - xr.lo) * kPlotW;
      const double py = kTop + kPlotH - (s.x(1, i) - yr.lo) / (yr.hi - yr.lo) * kPlotH;
      os << "<circle cx=\"" << fixed(px) << "\" cy=\"" << fixed(py) << "\" r=\"2\" fill=\"" << col << "\"/>\n";
    }
    if (k < labels.size())
      os << "<text x=\"" << kLeft + 6 << "\" y=\"" << kTop + 14 + 14 * static_cast<double>(k) << "\" font-size=\"11\" fill=\""
         << col << "\">" << esc(labels[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& file, const std::string& text)
{
  std::ofstream f(file, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + file.string());
  f << text;
}

void write_plots(const std::filesystem::path& dir, const Trajectory& traj, const SeriesTable& s)
{
  std::filesystem::create_directories(dir);
  write_text(dir / "energy.svg", svg_line_chart({"Energy", "t", "V"}, {{"V(t)", s.t, s.energy}}));
  write_text(dir / "speed_force.svg", svg_line_chart({"Speeds and forces", "t", "max norm", true},
                                                     {{"max |v_i|", s.t, s.max_speed}, {"max |F_i|", s.t, s.max_force}}));
  write_text(dir / "radius.svg", svg_line_chart({"Mean radius", "t", "mean |x_i - x_m|"}, {{"R(t)", s.t, s.mean_radius}}));
  write_text(dir / "control.svg", svg_line_chart({"Control magnitude", "t", "max |u_i|"}, {{"max |u_i|", s.t, s.max_control}}));
  std::vector<SwarmState> snaps;
  std::vector<std::string> labels;
  if (!traj.states.empty()) {
    const std::size_t n = traj.states.size();
    for (std::size_t k : {std::size_t{0}, n / 2, n - 1}) {
      if (!snaps.empty() && snaps.back().t == traj.states[k].t) continue;
      snaps.push_back(traj.states[k]);
      labels.push_back("t = " + tick(traj.states[k].t));
    }
  }
  write_text(dir / "snapshots.svg", svg_scatter("Agent positions", snaps, labels));
}

}  // namespace swarm
