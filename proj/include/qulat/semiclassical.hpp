#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "qulat/linalg.hpp"
#include "qulat/potential.hpp"

namespace qulat {

/// Numerical failures that are expected outcomes (no bounce exists, no
/// unstable mode, nothing to fit); the CLI maps these to exit code 3.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoBounceError : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct NoNegativeModeError : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct NoCrossingError : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};

/// Periodic lattice dispersion sqrt(omega^2 + (4/a^2) sin^2(pi alpha / N)).
double dispersion(double omega, double a, int n_sites, int alpha);

/// Radial profile of the O(2) saddle, with wall fit and action.
struct BounceProfile {
  std::vector<double> r_values;
  std::vector<double> phi_values;
  double phi_escape = 0.0;  // release value phi(0)
  double phi_fv = 0.0;      // exact false-vacuum location
  double r0 = 0.0;          // wall radius from the tanh fit
  double beta = 0.0;        // inverse wall width from the tanh fit
  double s1 = 0.0;          // instanton action / surface tension
};

/// Overshoot-undershoot shooting for phi'' + phi'/r = v'(phi) with phi'(0)=0.
/// Bisects the release value in (barrier top, true vacuum] until the
/// trajectory neither turns back above the false vacuum (undershoot) nor
/// crosses it (overshoot); the sampled profile is clamped to the false vacuum
/// beyond its closest approach. Degenerate wells raise NoBounceError;
/// bracket exhaustion raises NumericalFailure with the bracket.
BounceProfile bounce_profile(const Potential& p, double r_max, double tol = 0.0);

/// S1 = integral of sqrt(2 (v - v(fv))) d phi from the false vacuum to the
/// far-side zero of the shifted potential, with square-root endpoint
/// substitutions. Rejects paths where the shifted potential dips below
/// -1e-12 in the interior.
double instanton_action(const Potential& p, int quadrature_points = 2000);

/// Thin-wall critical radius S1 / (2 phi0 eps).
double critical_radius(double s1, double phi0, double eps);

/// Least squares of -phi0 tanh(beta (r - r0)) on a profile; deterministic
/// initialization from the zero crossing and the 10-90% width.
struct WallFit {
  double r0 = 0.0;
  double beta = 0.0;
  double rms = 0.0;
};
WallFit fit_wall(const std::vector<double>& r, const std::vector<double>& phi,
                 double phi0);

/// Unstable fluctuation mode of the bounce background.
struct NegativeMode {
  double omega_minus = 0.0;      // growth rate, sqrt(-eigenvalue)
  std::vector<double> chi;       // lattice profile, unit 2-norm
  double eigenvalue = 0.0;       // < 0
  int negative_count = 0;        // negative eigenvalues found
};

/// Lowest s-wave fluctuation eigenmode around the O(2) bounce:
///   -chi'' - chi'/r + v''(phi_B(r)) chi = lambda chi
/// solved on a refined radial grid (spacing h_max at most), then mirrored
/// about x_center onto the lattice sites x_n = n a. A non-negative lowest
/// eigenvalue raises NoNegativeModeError.
NegativeMode negative_mode(const Potential& p, const BounceProfile& bounce,
                           int n_sites, double a, double x_center,
                           double h_max = 0.1);

/// Spec'd convenience: treats the slice as the mirror of the radial profile
/// about the lattice midpoint and delegates to the radial solve.
NegativeMode negative_mode(const Potential& p, const std::vector<double>& phi_slice,
                           double a);

/// phi_B(|x - x_center|) sampled on the lattice, false vacuum beyond the
/// profile range.
std::vector<double> bubble_slice(const BounceProfile& bounce, int n_sites, double a,
                                 double x_center);

/// Two-wall tanh bubble phi_fv + (phi_in - phi_fv)/2 [tanh(b(x-xc+r0)) - tanh(b(x-xc-r0))].
std::vector<double> tanh_bubble_slice(double phi_fv, double phi_interior, double r0,
                                      double beta, int n_sites, double a,
                                      double x_center);

enum class PdeBoundary { Neumann, Dirichlet };

struct PdeResult {
  std::vector<double> times;
  std::vector<std::vector<double>> field;  // rows = times
  std::vector<double> final_velocity;
};

/// Leapfrog (velocity-Verlet) integration of phi_tt = phi_xx - v'(phi) on the
/// open chain. Neumann means the one-sided gradient of the open-chain energy;
/// Dirichlet pins the end values. Rejects dt >= a.
PdeResult classical_pde_evolve(const std::vector<double>& phi0,
                               const std::vector<double>& phidot0, const Potential& p,
                               double a, double dt, int steps, PdeBoundary bc,
                               int record_stride = 1);

/// Discrete energy functional of the leapfrog system (for conservation checks).
double pde_energy(const std::vector<double>& phi, const std::vector<double>& phidot,
                  const Potential& p, double a);

/// Backward-cap rendering: phi_tautau = -phi_xx + v'(phi) from (slice, 0).
/// Aborts when max|phi| exceeds 10 |phi_tv|, returning rows up to the last
/// valid step.
PdeResult euclidean_continuation(const std::vector<double>& phi_slice,
                                 const Potential& p, double a, double dtau, int steps,
                                 int record_stride = 1);

struct WallDiagnostics {
  std::vector<double> times;
  std::vector<double> left_wall;
  std::vector<double> right_wall;
  double v_term = 0.0;
  std::optional<double> d_bounce;
  std::optional<double> m_wall_estimate;
  bool superluminal = false;
  int reflection_index = -1;
};

/// Wall positions from linear interpolation of phi_mid crossings; terminal
/// velocity from a straight-line fit over the final quarter of the
/// pre-reflection trajectory; penetration depth and wall-mass estimate
/// 2 eps d_bounce / v_term^2 when an elastic edge reflection is present.
WallDiagnostics wall_diagnostics(const std::vector<double>& times,
                                 const std::vector<double>& xs,
                                 const std::vector<std::vector<double>>& field,
                                 double phi_mid, double eps);

struct HyperbolaFit {
  double r0 = 0.0;
  double rms = 0.0;
};

/// One-parameter fit of x(t) = sqrt(r0^2 + t^2).
HyperbolaFit fit_hyperbola(const std::vector<double>& t, const std::vector<double>& x);

}  // namespace qulat
