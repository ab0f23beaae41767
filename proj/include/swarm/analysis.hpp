#pragma once

#include "swarm/model.hpp"
#include "swarm/potential.hpp"
#include "swarm/types.hpp"

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace swarm {

enum class RingKind { Flock, Mill };

/// Equispaced ring x_i = c + R rot(theta) (cos 2 pi i/N, sin 2 pi i/N).
struct RingSpec {
  Vec2 center = Vec2::Zero();
  double R = 1.0;
  double omega = 0.0;  // orientation * cruise_speed / R for mills, 0 for flocks
  double theta = 0.0;
  int orientation = 1;
  int N = 2;

  static RingSpec flock(int N, double R, const Vec2& center = Vec2::Zero(), double theta = 0.0);
  static RingSpec mill(const ModelParams& params, int N, double R, const Vec2& center = Vec2::Zero(),
                       double theta = 0.0, int orientation = 1);
  void validate() const;
};

Points ring_positions(const RingSpec& spec);

/// Flock: every velocity equals vbar (|vbar| must be the cruise speed).
/// Mill: v_i = orientation * s * (x_i - c)^perp / |x_i - c|.
SwarmState ring_state(const RingSpec& spec, const ModelParams& params, RingKind kind, const Vec2& vbar = Vec2::Zero());

/// sum_{p=1}^{N-1} sin(p pi/N) [U'(2R sin(p pi/N)) - omega^2 2R sin(p pi/N)]
/// with omega = s/R for mills and 0 for flocks.
double mill_radius_residual(const RadialPotential& pot, const ModelParams& params, int N, double R,
                            RingKind kind = RingKind::Mill);

/// Bisection on [lo, hi]; throws DomainError without a sign change.
double mill_radius_solve(const RadialPotential& pot, const ModelParams& params, int N, double lo, double hi,
                         RingKind kind = RingKind::Mill);

/// Every root found from sign changes of the residual at `samples`
/// log-spaced radii in [lo, hi], ascending.
std::vector<double> mill_radius_scan(const RadialPotential& pot, const ModelParams& params, int N,
                                     RingKind kind = RingKind::Mill, double lo = 1e-2, double hi = 1e2,
                                     int samples = 200);

/// Argument convention for the radial force of a perturbed ring.
/// Chord uses the pair distance 2(R+r) sin(pi j/N), which makes phi(0) = R omega^2
/// at a mill. AsPrinted drops the factor 2.
enum class PhiConvention { Chord, AsPrinted };

/// phi(r) = (1/N) sum_{j=1}^{N-1} sin(pi j/N) U'(d_j(r)), the radial force on
/// each agent of a ring of radius R + r.
double phi_of_r(const RadialPotential& pot, int N, double R, double r, PhiConvention conv = PhiConvention::Chord);

/// Central difference of phi at 0 with step 1e-6 max(1, R).
double phi_prime(const RadialPotential& pot, int N, double R, PhiConvention conv = PhiConvention::Chord);

/// Closed form (2/N) sum sin^2(pi j/N) U''(2R sin(pi j/N)) of phi'(0), chord convention.
double phi_prime_closed_form(const RadialPotential& pot, int N, double R);

struct ReducedMillState {
  double r = 0.0;
  double gamma = 0.0;
  double w = 0.0;

  Eigen::Vector3d vec() const { return {r, gamma, w}; }
  static ReducedMillState from(const Eigen::Vector3d& y) { return {y(0), y(1), y(2)}; }
};

/// Rotationally symmetric perturbation of a mill ring: radius R + r, velocity
/// angle mismatch gamma, speed s + w.
ReducedMillState reduced_mill_rhs(const ReducedMillState& y, const RadialPotential& pot, const ModelParams& params,
                                  int N, double R, PhiConvention conv = PhiConvention::Chord);

/// Jacobian of reduced_mill_rhs at the origin:
/// [[0, s, 0], [-omega/R - phi'(0)/s, 0, 2/R], [0, -phi(0), -2 alpha]].
Eigen::Matrix3d mill_linearization_matrix(const RadialPotential& pot, const ModelParams& params, int N, double R,
                                          PhiConvention conv = PhiConvention::Chord);

struct CubicCoefficients {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
};

/// det(lambda I - A) = lambda^3 + a2 lambda^2 + a1 lambda + a0 from principal minors.
CubicCoefficients characteristic_coefficients(const Eigen::Matrix3d& A);

/// Roots of the monic cubic by the trigonometric / Cardano method, polished
/// with two Newton steps. Real roots come first, ascending.
std::array<std::complex<double>, 3> cubic_roots(const CubicCoefficients& c);

struct RouthHurwitz {
  bool stable = false;
  std::array<double, 3> margins{};  // a2, a0, a2 a1 - a0
};

RouthHurwitz routh_hurwitz_stable(double a2, double a1, double a0);

/// 2N x 2N matrix with blocks Hess W(x_i - x_j) off the diagonal and
/// -sum_{k != i} Hess W(x_i - x_k) on it.
Eigen::MatrixXd first_order_G(const RadialPotential& pot, const Points& xhat, double guard = kGuardRadius);

struct GSpectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  int zero_count = 0;           // |lambda| < tol
  double max_nonzero = 0.0;     // largest eigenvalue outside the zero band, -inf if none
};

/// Symmetric eigen-decomposition of G.
GSpectrum g_spectrum(const Eigen::MatrixXd& G, double tol = 1e-8);

/// Approximate inf over rotations/translations of x* and cruise-speed v-bar
/// of max_i |x_i - b - R_theta x*_i| + max_i |v_i - vbar|.
double distance_to_flock_manifold(const SwarmState& state, const Points& xstar, const ModelParams& params);

struct MillDiagnostics {
  double radius_dev = 0.0;  // mean | |x_i - x_m| - Rref |
  double gamma_mean = 0.0;  // mean angle between v_i and the oriented tangent
  double speed_dev = 0.0;   // mean | |v_i| - s |
};

/// Rref is the mean radius unless `R_target` is given. The tangent orientation
/// follows the sign of the angular momentum about the centroid.
MillDiagnostics mill_diagnostics(const SwarmState& state, const ModelParams& params,
                                 std::optional<double> R_target = std::nullopt);

/// Gradient descent of the pair energy from x until max_i |F_i| < tol.
/// Returns the relaxed positions; throws NumericError if it stalls.
Points relax_to_equilibrium(const RadialPotential& pot, const Points& x, double tol = 1e-10, int max_iter = 200000);

}  // namespace swarm
