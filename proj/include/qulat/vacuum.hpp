#pragma once

#include <cstdint>
#include <vector>

#include "qulat/mps.hpp"
#include "qulat/potential.hpp"
#include "qulat/qumode.hpp"

namespace qulat {

enum class ProductMethod { SHOGaussian, Adiabatic };

struct ProductVacuumOptions {
  double omega_override = 0.0;  // > 0 replaces the curvature-derived frequency
  int m_adiabatic = 600;        // ramp blocks for the Adiabatic method
  double dt_adiabatic = 0.05;
  LiftSpec lift;                // applied to the ramp target
};

/// Product of identical single-qumode "false vacuum" states: either the SHO
/// Gaussian matched to the false-well curvature, or the ramped anharmonic
/// ground state.
MPSState product_vacuum(const QumodeGrid& g, const Potential& p, int n_sites,
                        ProductMethod method, const ProductVacuumOptions& opts = {});

/// Position/momentum displacements that restore the long-range vacuum
/// correlations missing from a product of local ground states.
struct FluctuationSample {
  std::vector<double> dq;
  std::vector<double> dp;
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;
};

/// Difference: mode weights sqrt(1/w - 1/w_a) for dq and sqrt(w_a - w) for
/// dp, the correction on top of a product of local ground states. Full: the
/// free-vacuum weights sqrt(1/w_a), sqrt(w_a), generating every fluctuation
/// from scratch.
enum class FluctuationForm { Difference, Full };

/// dq_n = sum_a (2N)^(-1/2) W_q(a) cos(2 pi n a / N) eta_a and likewise dp_n,
/// with w_a from the periodic lattice dispersion. The reality constraint
/// eta_a = eta_{N-a} is built in: one normal per cosine mode, interior modes
/// at doubled amplitude. Bit-reproducible from (seed, sample_index).
FluctuationSample sample_fluctuations(double omega, int n_sites, double a,
                                      std::uint64_t seed, std::uint64_t sample_index,
                                      FluctuationForm form = FluctuationForm::Difference);

/// Rebuild each local Gaussian centered at phi_fv + dq_n, then apply the
/// phase gate exp(i dp_n q). Valid on product states of Gaussians.
void apply_fluctuations(MPSState& s, const QumodeGrid& g, const FluctuationSample& f,
                        double omega, double phi_fv);

/// C_nm = <q_n q_m> - <q_n><q_m>, symmetrized.
MatrixXd covariance_matrix(MPSState& s, const QumodeGrid& g);

/// Discrete-Fourier congruence diagonal of a symmetric matrix:
/// C(k_a) = (1/N) sum_nm C_nm exp(2 pi i a (n-m) / N), real parts.
VectorXd momentum_spectrum(const MatrixXd& c);

struct CovarianceFit {
  double m = 0.0;       // effective mass
  double c0 = 0.0;      // k-independent offset
  double residual = 0.0;  // RMS
  bool converged = false;
  VectorXd k_values;
  VectorXd c_values;
};

/// Least-squares fit of spectrum_a = 1/(2 sqrt(m^2 + (4/a^2) sin^2(pi alpha/N)))
/// + c0 over (m, c0): deterministic grid scan over m in [0.05, 5] at 1e-3
/// resolution with c0 solved linearly, then a bounded local refinement.
CovarianceFit fit_dispersion(const VectorXd& spectrum, double a, int n_sites,
                             double residual_threshold = 1e-2);

/// Curvature of a quartic polynomial fit to the sampled on-site potential,
/// evaluated at the fitted minimum; the effective mass the grid actually sees.
double discretized_potential_mass(const QumodeGrid& g, const Potential& p,
                                  double center, double window);

}  // namespace qulat
