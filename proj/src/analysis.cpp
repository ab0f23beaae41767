#include "swarm/analysis.hpp"

#include "swarm/geometry.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace swarm {

using std::numbers::pi;

// ---------------------------------------------------------------- rings

RingSpec RingSpec::flock(int N, double R, const Vec2& center, double theta)
{
  RingSpec s;
  s.N = N;
  s.R = R;
  s.center = center;
  s.theta = theta;
  s.omega = 0.0;
  return s;
}

RingSpec RingSpec::mill(const ModelParams& params, int N, double R, const Vec2& center, double theta,
                        int orientation)
{
  RingSpec s = flock(N, R, center, theta);
  s.orientation = orientation >= 0 ? 1 : -1;
  s.omega = s.orientation * params.cruise_speed() / R;
  return s;
}

void RingSpec::validate() const
{
  if (!(R > 0)) throw ConfigError("ring radius must be > 0");
  if (N < 1) throw ConfigError("ring needs N >= 1");
  if (orientation != 1 && orientation != -1) throw ConfigError("ring orientation must be +1 or -1");
}

Points ring_positions(const RingSpec& spec)
{
  spec.validate();
  Points x(2, spec.N);
  const Mat2 rot = rotation(spec.theta);
  for (int i = 0; i < spec.N; ++i) {
    const double a = 2.0 * pi * i / spec.N;
    x.col(i) = spec.center + spec.R * rot * Vec2(std::cos(a), std::sin(a));
  }
  return x;
}

SwarmState ring_state(const RingSpec& spec, const ModelParams& params, RingKind kind, const Vec2& vbar)
{
  SwarmState s(spec.N);
  s.x = ring_positions(spec);
  if (kind == RingKind::Flock) {
    if (std::abs(vbar.norm() - params.cruise_speed()) > 1e-9)
      throw ConfigError("flock ring velocity must have the cruise speed");
    s.v.colwise() = vbar;
    return s;
  }
  const double sp = params.cruise_speed();
  for (int i = 0; i < spec.N; ++i) {
    const Vec2 d = s.x.col(i) - spec.center;
    s.v.col(i) = spec.orientation * sp * perp(d) / d.norm();
  }
  return s;
}

// ---------------------------------------------------------------- radius equation

double mill_radius_residual(const RadialPotential& pot, const ModelParams& params, int N, double R, RingKind kind)
{
  if (!(R > 0)) throw DomainError("mill radius must be > 0");
  const double omega = kind == RingKind::Mill ? params.cruise_speed() / R : 0.0;
  double sum = 0.0;
  for (int p = 1; p < N; ++p) {
    const double sn = std::sin(p * pi / N);
    const double d = 2.0 * R * sn;
    sum += sn * (potential_deriv(pot, d) - omega * omega * d);
  }
  return sum;
}

double mill_radius_solve(const RadialPotential& pot, const ModelParams& params, int N, double lo, double hi,
                         RingKind kind)
{
  if (!(lo > 0) || !(hi > lo)) throw DomainError("mill radius bracket must satisfy 0 < lo < hi");
  auto f = [&](double R) { return mill_radius_residual(pot, params, N, R, kind); };
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw DomainError("mill radius residual has no sign change on the bracket");
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-12; };
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (a + b);
}

std::vector<double> mill_radius_scan(const RadialPotential& pot, const ModelParams& params, int N, RingKind kind,
                                     double lo, double hi, int samples)
{
  std::vector<double> r(static_cast<std::size_t>(samples)), f(r.size());
  const double la = std::log(lo), lb = std::log(hi);
  double scale = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    r[k] = k + 1 == r.size() ? hi : std::exp(la + (lb - la) * static_cast<double>(k) / (samples - 1));
    f[k] = mill_radius_residual(pot, params, N, r[k], kind);
    scale = std::max(scale, std::abs(f[k]));
  }
  // sign changes buried in rounding noise (e.g. underflowing tails) are not roots
  const double floor = 1e-12 * scale;
  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    if (std::max(std::abs(f[k]), std::abs(f[k + 1])) <= floor) continue;
    if (f[k] == 0.0) {
      roots.push_back(r[k]);
    } else if (f[k + 1] != 0.0 && (f[k] < 0) != (f[k + 1] < 0)) {
      roots.push_back(mill_radius_solve(pot, params, N, r[k], r[k + 1], kind));
    }
  }
  if (f.back() == 0.0) roots.push_back(r.back());
  return roots;
}

// ---------------------------------------------------------------- reduced mill system

double phi_of_r(const RadialPotential& pot, int N, double R, double r, PhiConvention conv)
{
  const double scale = conv == PhiConvention::Chord ? 2.0 : 1.0;
  if (!(R + r > 0)) throw DomainError("phi: R + r must be > 0");
  double sum = 0.0;
  for (int j = 1; j < N; ++j) {
    const double sn = std::sin(pi * j / N);
    sum += sn * potential_deriv(pot, scale * (R + r) * sn);
  }
  return sum / N;
}

double phi_prime(const RadialPotential& pot, int N, double R, PhiConvention conv)
{
  const double h = 1e-6 * std::max(1.0, R);
  return (phi_of_r(pot, N, R, h, conv) - phi_of_r(pot, N, R, -h, conv)) / (2 * h);
}

double phi_prime_closed_form(const RadialPotential& pot, int N, double R)
{
  double sum = 0.0;
  for (int j = 1; j < N; ++j) {
    const double sn = std::sin(pi * j / N);
    sum += sn * sn * potential_second_deriv(pot, 2.0 * R * sn);
  }
  return 2.0 * sum / N;
}

ReducedMillState reduced_mill_rhs(const ReducedMillState& y, const RadialPotential& pot, const ModelParams& params,
                                  int N, double R, PhiConvention conv)
{
  const double s = params.cruise_speed();
  const double sw = s + y.w;
  if (!(sw > 0)) throw DomainError("reduced mill system needs s + w > 0");
  if (!(R + y.r > 0)) throw DomainError("reduced mill system needs R + r > 0");
  const double phi = phi_of_r(pot, N, R, y.r, conv);
  ReducedMillState d;
  d.r = sw * std::sin(y.gamma);
  d.gamma = (sw / (R + y.r) - phi / sw) * std::cos(y.gamma);
  d.w = -(2.0 * std::sqrt(params.alpha * params.beta) * y.w + params.beta * y.w * y.w) * sw - phi * std::sin(y.gamma);
  return d;
}

Eigen::Matrix3d mill_linearization_matrix(const RadialPotential& pot, const ModelParams& params, int N, double R,
                                          PhiConvention conv)
{
  const double s = params.cruise_speed();
  const double omega = s / R;
  Eigen::Matrix3d A;
  A << 0.0, s, 0.0,                                               //
      -omega / R - phi_prime(pot, N, R, conv) / s, 0.0, 2.0 / R,  //
      0.0, -phi_of_r(pot, N, R, 0.0, conv), -2.0 * params.alpha;
  return A;
}

CubicCoefficients characteristic_coefficients(const Eigen::Matrix3d& A)
{
  CubicCoefficients c;
  c.a2 = -A.trace();
  c.a1 = (A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0)) + (A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0)) +
         (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1));
  c.a0 = -A.determinant();
  return c;
}

std::array<std::complex<double>, 3> cubic_roots(const CubicCoefficients& c)
{
  using cd = std::complex<double>;
  // lambda = t - a2/3 gives t^3 + p t + q
  const double sh = c.a2 / 3.0;
  const double p = c.a1 - c.a2 * c.a2 / 3.0;
  const double q = 2.0 * c.a2 * c.a2 * c.a2 / 27.0 - c.a2 * c.a1 / 3.0 + c.a0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  std::array<cd, 3> r;
  if (p == 0.0 && q == 0.0) {
    r = {cd(0), cd(0), cd(0)};
  } else if (disc > 0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + sq), v = std::cbrt(-q / 2.0 - sq);
    r[0] = cd(u + v);
    r[1] = cd(-(u + v) / 2.0, std::sqrt(3.0) / 2.0 * (u - v));
    r[2] = std::conj(r[1]);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double th = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) r[static_cast<std::size_t>(k)] = cd(m * std::cos(th - 2.0 * pi * k / 3.0));
  }
  for (auto& z : r) {
    z -= sh;
    for (int it = 0; it < 2; ++it) {
      const cd f = ((z + c.a2) * z + c.a1) * z + c.a0;
      const cd df = (3.0 * z + 2.0 * c.a2) * z + c.a1;
      if (std::abs(df) > 0) z -= f / df;
    }
  }
  std::sort(r.begin(), r.end(), [](const cd& a, const cd& b) {
    const bool ra = a.imag() == 0.0, rb = b.imag() == 0.0;
    if (ra != rb) return ra;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return r;
}

RouthHurwitz routh_hurwitz_stable(double a2, double a1, double a0)
{
  RouthHurwitz out;
  out.margins = {a2, a0, a2 * a1 - a0};
  out.stable = a2 > 0 && a0 > 0 && a2 * a1 - a0 > 0;
  return out;
}

// ---------------------------------------------------------------- first-order linearization

Eigen::MatrixXd first_order_G(const RadialPotential& pot, const Points& xhat, double guard)
{
  const Eigen::Index n = xhat.cols();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec2 d = xhat.col(i) - xhat.col(j);
      if (d.norm() < guard) throw CollisionError(i, j, d.norm());
      const Mat2 H = hessian_W(pot, d, guard);  // even in d
      G.block<2, 2>(2 * i, 2 * j) = H;
      G.block<2, 2>(2 * j, 2 * i) = H;
      G.block<2, 2>(2 * i, 2 * i) -= H;
      G.block<2, 2>(2 * j, 2 * j) -= H;
    }
  }
  return G;
}

GSpectrum g_spectrum(const Eigen::MatrixXd& G, double tol)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("G eigen-solve did not converge");
  GSpectrum out;
  out.eigenvalues = es.eigenvalues();
  out.max_nonzero = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < out.eigenvalues.size(); ++k) {
    const double l = out.eigenvalues(k);
    if (std::abs(l) < tol)
      ++out.zero_count;
    else
      out.max_nonzero = std::max(out.max_nonzero, l);
  }
  return out;
}

// ---------------------------------------------------------------- manifold distances

namespace {

// Minimize a 2 pi periodic function: uniform grid, then Brent around the best cell.
double periodic_min(const std::function<double(double)>& f, int grid)
{
  double best = std::numeric_limits<double>::infinity();
  int kb = 0;
  for (int k = 0; k < grid; ++k) {
    const double v = f(2.0 * pi * k / grid);
    if (v < best) {
      best = v;
      kb = k;
    }
  }
  const double h = 2.0 * pi / grid;
  const double c = h * kb;
  const auto res = boost::math::tools::brent_find_minima(f, c - h, c + h, 40);
  return std::min(best, res.second);
}

}  // namespace

double distance_to_flock_manifold(const SwarmState& state, const Points& xstar, const ModelParams& params)
{
  if (xstar.cols() != state.size()) throw DomainError("flock manifold reference has the wrong agent count");
  const double s = params.cruise_speed();

  auto pos_cost = [&](double th) {
    const Points y = state.x - rotation(th) * xstar;
    return minimal_enclosing_circle(y).radius;
  };
  auto vel_cost = [&](double ph) {
    const Vec2 vb = s * Vec2(std::cos(ph), std::sin(ph));
    return (state.v.colwise() - vb).colwise().norm().maxCoeff();
  };
  double vbest = periodic_min(vel_cost, 720);
  const Vec2 mean = state.v.rowwise().mean();
  if (mean.norm() > 0) vbest = std::min(vbest, vel_cost(std::atan2(mean.y(), mean.x())));
  return periodic_min(pos_cost, 720) + vbest;
}

MillDiagnostics mill_diagnostics(const SwarmState& state, const ModelParams& params, std::optional<double> R_target)
{
  MillDiagnostics d;
  const Eigen::Index n = state.size();
  if (n == 0) return d;
  const Vec2 xm = state.x.rowwise().mean();
  const Points rel = state.x.colwise() - xm;
  const Eigen::RowVectorXd radii = rel.colwise().norm();
  const double Rref = R_target ? *R_target : radii.mean();
  double am = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) am += perp(rel.col(i)).dot(state.v.col(i));
  const double o = am < 0 ? -1.0 : 1.0;
  const double s = params.cruise_speed();
  for (Eigen::Index i = 0; i < n; ++i) {
    d.radius_dev += std::abs(radii(i) - Rref);
    const Vec2 v = state.v.col(i);
    d.speed_dev += std::abs(v.norm() - s);
    if (radii(i) > 0 && v.norm() > 0) {
      const Vec2 t = o * perp(rel.col(i)) / radii(i);
      d.gamma_mean += std::abs(std::atan2(cross(t, v), t.dot(v)));
    }
  }
  const double nn = static_cast<double>(n);
  d.radius_dev /= nn;
  d.gamma_mean /= nn;
  d.speed_dev /= nn;
  return d;
}

Points relax_to_equilibrium(const RadialPotential& pot, const Points& x0, double tol, int max_iter)
{
  auto energy = [&](const Points& x) {
    SwarmState s(0.0, x, Points::Zero(2, x.cols()));
    return total_energy(s, pot);
  };
  // Barzilai-Borwein steps with a nonmonotone (max of the last 10 values)
  // acceptance test, so rounding in the energy does not stall the descent.
  Points x = x0;
  Points F = interaction_forces(pot, x);
  double E = energy(x);
  std::vector<double> recent{E};
  double step = 1.0;
  Points x_prev, F_prev;
  for (int it = 0; it < max_iter; ++it) {
    if (F.colwise().norm().maxCoeff() < tol) return x;
    if (it > 0) {
      const Points dx = x - x_prev, dg = F - F_prev;
      const double sy = dx.cwiseProduct(dg).sum();
      if (sy > 0) step = std::clamp(dx.squaredNorm() / sy, 1e-6, 1e6);
    }
    const double ref = *std::max_element(recent.begin(), recent.end());
    const double g2 = F.squaredNorm();
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Points xn = x - step * F;
      double En;
      try {
        En = energy(xn);
      } catch (const NumericError&) {
        step *= 0.5;
        continue;
      }
      if (En <= ref - 1e-4 * step * g2 + 1e-13 * std::max(1.0, std::abs(E))) {
        x_prev = x;
        F_prev = F;
        x = xn;
        E = En;
        F = interaction_forces(pot, x);
        recent.push_back(E);
        if (recent.size() > 10) recent.erase(recent.begin());
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) throw NumericError("relax_to_equilibrium stalled");
  }
  throw NumericError("relax_to_equilibrium did not reach tolerance");
}

}  // namespace swarm
