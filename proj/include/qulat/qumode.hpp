#pragma once

#include <vector>

#include "qulat/linalg.hpp"
#include "qulat/potential.hpp"

namespace qulat {

/// d-point truncation of a quadrature axis [-L, L]: q_j = -L + (j+1) dq for
/// j = 0..d-1 with dq = 2L/d, so the points run from -L+dq to L.
struct QumodeGrid {
  int d = 0;
  double L = 0.0;
  double dq = 0.0;
  VectorXd points;
};

struct LocalWavefunction {
  QumodeGrid grid;
  VectorXcd amplitudes;  // unit 2-norm after normalize()

  void normalize();
  double norm() const;
  /// |psi_j|^2 / dq, so densities are comparable across grids.
  VectorXd density() const;
};

struct LocalOperator {
  QumodeGrid grid;
  MatrixXcd matrix;
};

QumodeGrid build_grid(int d, double L);

/// Heuristic grid half-width for a potential: |phi_fv| + 4/sqrt(curvature),
/// at least |phi_tv| + 3. Override in config when it does not fit.
double default_half_width(const Potential& p);

/// q as a diagonal matrix.
LocalOperator position_operator(const QumodeGrid& g);

/// Positive-semidefinite second difference (1/dq^2) tridiag(-1, 2, -1),
/// Dirichlet-truncated at the grid ends.
LocalOperator momentum_squared_operator(const QumodeGrid& g);

/// Symmetric-difference first derivative times -i (Hermitian momentum).
LocalOperator momentum_operator(const QumodeGrid& g);

LocalWavefunction sho_ground_state(const QumodeGrid& g, double omega, double center);

/// nu-th bound state of the tanh^2 well with integer depth parameter gamma:
/// amplitudes sample P^{gamma-nu}_gamma(tanh(alpha (q-center))), and the
/// closed-form energy is alpha^2/2 (gamma(gamma+1) - (gamma-nu)^2).
struct PtEigenstate {
  LocalWavefunction state;
  double energy;
};
PtEigenstate pt_eigenstate(const QumodeGrid& g, double alpha, int gamma, int nu,
                           double center);

/// p^2/2 + diag(v(q)).
LocalOperator single_site_hamiltonian(const QumodeGrid& g, const Potential& p);

Complex inner(const LocalWavefunction& a, const LocalWavefunction& b);
double expectation(const LocalWavefunction& psi, const LocalOperator& op);

struct QumodeTrajectory {
  std::vector<double> times;
  std::vector<VectorXd> densities;  // |psi|^2/dq per record
  LocalWavefunction final_state;
};

/// Split-step evolution under p^2/2 + v(q): alternating kinetic and potential
/// phase gates of size dt, recording the density every record_stride steps.
/// The kinetic exponential is built once per call via eigendecomposition.
QumodeTrajectory evolve_qumode(const LocalWavefunction& psi0, const Potential& p,
                               double dt, int steps, int record_stride);

/// Ramped preparation of the anharmonic well ground state: M split-step
/// blocks, block r applying the kinetic gate, the reference SHO gate, and the
/// residual-potential gate weighted by s = r/M. p_target carries its lift.
LocalWavefunction adiabatic_prepare(const QumodeGrid& g, double omega,
                                    double center, const Potential& p_target,
                                    int m_blocks, double dt);

}  // namespace qulat
