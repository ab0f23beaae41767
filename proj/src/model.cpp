#include "swarm/model.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>
#include <vector>

namespace swarm {

namespace {

bool collision_fatal(const RadialPotential& pot)
{
  return singular_at_origin(pot) || std::holds_alternative<PowerLaw>(pot);
}

std::vector<double> log_grid(double lo, double hi, int n)
{
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace

namespace {

// U'(r)/r as a function of r^2, specialized per family so the pair loop
// carries no variant dispatch.
struct DerivOverR {
  const RadialPotential& pot;

  template <typename Loop>
  void run(Loop&& loop) const
  {
    std::visit(
        [&](const auto& fam) {
          using F = std::decay_t<decltype(fam)>;
          if constexpr (std::is_same_v<F, QuasiMorse>) {
            const double half_p = fam.p / 2, inv_p = 1.0 / fam.p, lp = std::pow(fam.l, -fam.p), C = fam.C;
            loop([=](double r2) {
              const double a = std::pow(r2, half_p);
              const double b = a * lp;
              return (a * std::exp(-a * inv_p) - C * b * std::exp(-b * inv_p)) / r2;
            });
          } else if constexpr (std::is_same_v<F, PowerLaw>) {
            const double ha = fam.a / 2, hb = fam.b / 2;
            loop([=](double r2) { return (std::pow(r2, ha) - std::pow(r2, hb)) / r2; });
          } else if constexpr (std::is_same_v<F, Morse>) {
            loop([&fam](double r2) {
              const double r = std::sqrt(r2);
              return kernel::deriv(fam, r) / r;
            });
          } else {
            loop([](double) { return 0.0; });
          }
        },
        pot);
  }
};

}  // namespace

Points interaction_forces(const RadialPotential& pot, const Points& x, double guard)
{
  const Eigen::Index n = x.cols();
  Points F = Points::Zero(2, n);
  if (std::holds_alternative<NoInteraction>(pot)) return F;
  const bool fatal = collision_fatal(pot);
  const double guard2 = guard * guard;
  DerivOverR{pot}.run([&](auto dUr) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = x(0, i), yi = x(1, i);
      double fx = 0.0, fy = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double dx = xi - x(0, j), dy = yi - x(1, j);
        const double r2 = dx * dx + dy * dy;
        if (r2 < guard2) {
          if (fatal) throw CollisionError(i, j, std::sqrt(r2));
          continue;
        }
        const double g = dUr(r2);
        fx += g * dx;
        fy += g * dy;
        F(0, j) -= g * dx;
        F(1, j) -= g * dy;
      }
      F(0, i) += fx;
      F(1, i) += fy;
    }
  });
  F /= static_cast<double>(n);
  if (!F.allFinite()) throw NonFiniteError(std::nan(""), "interaction_forces");
  return F;
}

Points radial_forces(const std::function<double(double)>& dU, const Points& x, double guard)
{
  const Eigen::Index n = x.cols();
  Points F = Points::Zero(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec2 d = x.col(i) - x.col(j);
      const double r = d.norm();
      if (r < guard) throw CollisionError(i, j, r);
      const Vec2 g = dU(r) / r * d;
      F.col(i) += g;
      F.col(j) -= g;
    }
  }
  return F / static_cast<double>(n);
}

double total_energy(const SwarmState& state, const RadialPotential& pot, double guard)
{
  const Eigen::Index n = state.size();
  double kinetic = 0.5 * state.v.colwise().squaredNorm().sum();
  double pair = 0.0;
  if (!std::holds_alternative<NoInteraction>(pot)) {
    const bool fatal = collision_fatal(pot);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double r = (state.x.col(i) - state.x.col(j)).norm();
        if (r < guard && fatal) throw CollisionError(i, j, r, state.t);
        pair += potential_value(pot, r);
      }
    }
  }
  // each unordered pair appears twice in the i != j double sum
  return kinetic + pair / static_cast<double>(n);
}

double energy_rate(const SwarmState& state, const ModelParams& params, const Points& u)
{
  double rate = 0.0;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const double s2 = state.v.col(i).squaredNorm();
    rate += (params.alpha - params.beta * s2) * s2 + state.v.col(i).dot(u.col(i));
  }
  return rate;
}

double threshold_M_alpha_beta(const ModelParams& params)
{
  return std::sqrt(4.0 * params.alpha * params.alpha * params.alpha / (27.0 * params.beta));
}

double sampled_sup(const std::function<double(double)>& f, double r_lo, double r_hi, int samples)
{
  const auto grid = log_grid(r_lo, r_hi, samples);
  double best = -kUnbounded;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double y = f(grid[k]);
    if (y > best) {
      best = y;
      best_k = k;
    }
  }
  const double a = grid[best_k == 0 ? 0 : best_k - 1];
  const double b = grid[std::min(best_k + 1, grid.size() - 1)];
  if (b > a) {
    const auto res = boost::math::tools::brent_find_minima([&](double r) { return -f(r); }, a, b, 52);
    best = std::max(best, -res.second);
  }
  return best;
}

ForceBounds force_bounds(const RadialPotential& pot, double Rbar, int N)
{
  const double r_N = 2.0 * std::sin(std::numbers::pi / N) * Rbar;
  constexpr double lo = 1e-6, hi = 1e6;
  ForceBounds out;
  auto dU = [&](double r) { return potential_deriv(pot, r); };
  auto abs_dU = [&](double r) { return std::abs(potential_deriv(pot, r)); };

  if (std::holds_alternative<NoInteraction>(pot)) {
    out.M_F = out.tilde_M_F = out.tilde_M_N = 0.0;
    return out;
  }

  if (const auto* m = std::get_if<Morse>(&pot)) {
    // U' = A e^{-r/la} - B e^{-r/lr}; U'' vanishes at a single r*.
    std::vector<double> cand{0.0};
    const double A = m->C_A / m->ell_A, B = m->C_R / m->ell_R;
    if (m->ell_A != m->ell_R) {
      const double ratio = (B / m->ell_R) / (A / m->ell_A);
      const double rate = 1.0 / m->ell_R - 1.0 / m->ell_A;
      const double rstar = std::log(ratio) / rate;
      if (ratio > 0 && rstar > 0 && std::isfinite(rstar)) cand.push_back(rstar);
    }
    double mf = 0.0, tmf = 0.0, tmn = std::abs(dU(r_N));
    for (double r : cand) {
      mf = std::max(mf, abs_dU(r));
      tmf = std::max(tmf, dU(r));
      if (r >= r_N) tmn = std::max(tmn, abs_dU(r));
    }
    out.M_F = mf;
    out.tilde_M_F = tmf;  // U' -> 0 at infinity, so sup U' >= 0
    out.tilde_M_N = tmn;
    return out;
  }

  if (const auto* w = std::get_if<PowerLaw>(&pot)) {
    // Either a > 1 (U' grows without bound) or b < a <= 1 (U' -> -inf at 0).
    out.M_F = kUnbounded;
    if (w->a > 1.0) {
      out.tilde_M_F = kUnbounded;
      out.tilde_M_N = kUnbounded;
    } else {
      out.tilde_M_F = std::max(0.0, sampled_sup(dU, lo, hi));
      out.tilde_M_N = std::max(abs_dU(r_N), sampled_sup(abs_dU, r_N, std::max(hi, 10 * r_N)));
    }
    return out;
  }

  const auto& q = std::get<QuasiMorse>(pot);
  // U'(r) ~ r^{p-1} (1 - C l^{-p}) as r -> 0
  const double lead = 1.0 - q.C * std::pow(q.l, -q.p);
  const bool blows_up = q.p < 1.0 && lead != 0.0;
  out.M_F = blows_up ? kUnbounded : std::max(sampled_sup(abs_dU, lo, hi), q.p >= 1.0 ? std::abs(dU(0.0)) : 0.0);
  out.tilde_M_F = (blows_up && lead > 0) ? kUnbounded
                                         : std::max({0.0, sampled_sup(dU, lo, hi), q.p >= 1.0 ? dU(0.0) : 0.0});
  out.tilde_M_N = r_N > 0 ? std::max(abs_dU(r_N), sampled_sup(abs_dU, r_N, std::max(hi, 10 * r_N))) : out.M_F;
  return out;
}

double gradient_lipschitz_bound(const RadialPotential& pot, double r_lo, double r_hi)
{
  auto h = [&](double r) {
    return std::max(std::abs(potential_second_deriv(pot, r)), std::abs(potential_deriv(pot, r) / r));
  };
  return sampled_sup(h, r_lo, r_hi, 10000);
}

double decay_radius(const RadialPotential& pot, double eta, double r_hi)
{
  const auto grid = log_grid(1e-6, r_hi, 100000);
  std::ptrdiff_t last_bad = -1;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::abs(potential_deriv(pot, grid[k])) >= eta) last_bad = static_cast<std::ptrdiff_t>(k);
  }
  if (last_bad + 1 >= static_cast<std::ptrdiff_t>(grid.size())) return kUnbounded;
  return grid[static_cast<std::size_t>(last_bad + 1)];
}

}  // namespace swarm
