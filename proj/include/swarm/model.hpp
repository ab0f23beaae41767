#pragma once

#include "swarm/potential.hpp"
#include "swarm/types.hpp"

#include <functional>
#include <limits>

namespace swarm {

/// F_i = (1/N) sum_{j != i} grad W(x_i - x_j).
///
/// Pairs are visited in lexicographic (i, j) order with i < j, and each pair
/// contributes +g to F_i and -g to F_j, so the result is reproducible and the
/// forces sum to zero up to rounding.
Points interaction_forces(const RadialPotential& pot, const Points& x, double guard = kGuardRadius);

/// Forces from an arbitrary radial derivative r -> U'(r), same conventions.
Points radial_forces(const std::function<double(double)>& dU, const Points& x, double guard = kGuardRadius);

/// V = 1/2 sum |v_i|^2 + 1/(2N) sum_{i != j} W(x_i - x_j).
double total_energy(const SwarmState& state, const RadialPotential& pot, double guard = kGuardRadius);

/// Kinetic power sum_i [(alpha - beta|v_i|^2)|v_i|^2 + v_i . u_i], the time
/// derivative of total_energy along the controlled dynamics.
double energy_rate(const SwarmState& state, const ModelParams& params, const Points& u);

/// sqrt(4 alpha^3 / (27 beta)), the maximum of s -> alpha s - beta s^3 on s >= 0.
double threshold_M_alpha_beta(const ModelParams& params);

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();
inline bool is_unbounded(double v) { return std::isinf(v); }

struct ForceBounds {
  double M_F = kUnbounded;        // sup_{r>0} |U'(r)|
  double tilde_M_F = kUnbounded;  // sup_{r>0} U'(r)
  double tilde_M_N = kUnbounded;  // sup_{r > 2 sin(pi/N) Rbar} |U'(r)|
};

/// Suprema of the interaction derivative. Unbounded suprema are reported as
/// kUnbounded. Morse is handled in closed form, other families by log-spaced
/// sampling on [1e-6, 1e6] refined with Brent's method.
ForceBounds force_bounds(const RadialPotential& pot, double Rbar, int N);

/// sup_{r >= r_lo} of f, sampled on a log grid and refined around the best sample.
double sampled_sup(const std::function<double(double)>& f, double r_lo, double r_hi, int samples = 100000);

/// Lipschitz bound of grad W on r >= r_lo: max(|U''|, |U'/r|).
double gradient_lipschitz_bound(const RadialPotential& pot, double r_lo = 0.05, double r_hi = 1e3);

/// Smallest R0 on a log grid such that |U'(r)| < eta for every sampled r >= R0.
/// Returns kUnbounded when no such radius exists below r_hi.
double decay_radius(const RadialPotential& pot, double eta, double r_hi = 1e6);

}  // namespace swarm
