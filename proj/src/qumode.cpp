#include "qulat/qumode.hpp"

#include <cmath>
#include <stdexcept>

namespace qulat {

void LocalWavefunction::normalize() {
  double n = amplitudes.norm();
  if (n <= 0) throw std::runtime_error("normalize: zero wavefunction");
  amplitudes /= n;
}

double LocalWavefunction::norm() const { return amplitudes.norm(); }

VectorXd LocalWavefunction::density() const {
  return amplitudes.cwiseAbs2() / grid.dq;
}

QumodeGrid build_grid(int d, double L) {
  if (d < 2) throw std::invalid_argument("build_grid: d must be >= 2");
  if (L <= 0) throw std::invalid_argument("build_grid: L must be > 0");
  QumodeGrid g;
  g.d = d;
  g.L = L;
  g.dq = 2.0 * L / d;
  g.points.resize(d);
  for (int j = 0; j < d; ++j) g.points[j] = -L + (j + 1) * g.dq;
  return g;
}

double default_half_width(const Potential& p) {
  double curv = std::max(p.curvature_fv(), 1e-2);
  double L = std::abs(p.false_vacuum()) + 4.0 / std::sqrt(curv);
  if (p.has_two_minima()) L = std::max(L, std::abs(p.true_vacuum()) + 3.0);
  return L;
}

LocalOperator position_operator(const QumodeGrid& g) {
  LocalOperator op{g, MatrixXcd::Zero(g.d, g.d)};
  for (int j = 0; j < g.d; ++j) op.matrix(j, j) = g.points[j];
  return op;
}

LocalOperator momentum_squared_operator(const QumodeGrid& g) {
  LocalOperator op{g, MatrixXcd::Zero(g.d, g.d)};
  double w = 1.0 / (g.dq * g.dq);
  for (int j = 0; j < g.d; ++j) {
    op.matrix(j, j) = 2.0 * w;
    if (j + 1 < g.d) {
      op.matrix(j, j + 1) = -w;
      op.matrix(j + 1, j) = -w;
    }
  }
  return op;
}

LocalOperator momentum_operator(const QumodeGrid& g) {
  LocalOperator op{g, MatrixXcd::Zero(g.d, g.d)};
  Complex c(0.0, -0.5 / g.dq);
  for (int j = 0; j + 1 < g.d; ++j) {
    op.matrix(j, j + 1) = c;
    op.matrix(j + 1, j) = -c;
  }
  return op;
}

LocalWavefunction sho_ground_state(const QumodeGrid& g, double omega, double center) {
  if (omega <= 0) throw std::invalid_argument("sho_ground_state: omega must be > 0");
  LocalWavefunction psi{g, VectorXcd(g.d)};
  for (int j = 0; j < g.d; ++j) {
    double x = g.points[j] - center;
    psi.amplitudes[j] = std::exp(-0.5 * omega * x * x);
  }
  psi.normalize();
  return psi;
}

PtEigenstate pt_eigenstate(const QumodeGrid& g, double alpha, int gamma, int nu,
                           double center) {
  if (gamma < 1) throw std::invalid_argument("pt_eigenstate: gamma must be >= 1");
  if (nu < 0 || nu >= gamma)
    throw std::invalid_argument("pt_eigenstate: need 0 <= nu <= gamma-1");
  int m = gamma - nu;
  LocalWavefunction psi{g, VectorXcd(g.d)};
  for (int j = 0; j < g.d; ++j) {
    double t = std::tanh(alpha * (g.points[j] - center));
    psi.amplitudes[j] = std::assoc_legendre(gamma, m, t);
  }
  psi.normalize();
  double energy = 0.5 * alpha * alpha *
                  (gamma * (gamma + 1.0) - double(m) * double(m));
  return {psi, energy};
}

LocalOperator single_site_hamiltonian(const QumodeGrid& g, const Potential& p) {
  LocalOperator h = momentum_squared_operator(g);
  h.matrix *= 0.5;
  for (int j = 0; j < g.d; ++j) h.matrix(j, j) += p.value(g.points[j]);
  return h;
}

Complex inner(const LocalWavefunction& a, const LocalWavefunction& b) {
  if (a.grid.d != b.grid.d) throw std::invalid_argument("inner: dimension mismatch");
  return a.amplitudes.dot(b.amplitudes);
}

double expectation(const LocalWavefunction& psi, const LocalOperator& op) {
  Complex v = psi.amplitudes.dot(op.matrix * psi.amplitudes);
  double n2 = psi.amplitudes.squaredNorm();
  return v.real() / n2;
}

namespace {

MatrixXd real_p2_half(const QumodeGrid& g) {
  MatrixXd m = MatrixXd::Zero(g.d, g.d);
  double w = 0.5 / (g.dq * g.dq);
  for (int j = 0; j < g.d; ++j) {
    m(j, j) = 2.0 * w;
    if (j + 1 < g.d) {
      m(j, j + 1) = -w;
      m(j + 1, j) = -w;
    }
  }
  return m;
}

}  // namespace

QumodeTrajectory evolve_qumode(const LocalWavefunction& psi0, const Potential& p,
                               double dt, int steps, int record_stride) {
  if (dt <= 0) throw std::invalid_argument("evolve_qumode: dt must be > 0");
  if (record_stride < 1) record_stride = 1;
  const QumodeGrid& g = psi0.grid;

  MatrixXcd kin = hermitian_exp(real_p2_half(g), Complex(0.0, -dt));
  VectorXcd pot(g.d);
  for (int j = 0; j < g.d; ++j) pot[j] = std::exp(Complex(0.0, -dt * p.value(g.points[j])));

  QumodeTrajectory out;
  LocalWavefunction psi = psi0;
  out.times.push_back(0.0);
  out.densities.push_back(psi.density());
  for (int s = 1; s <= steps; ++s) {
    psi.amplitudes = kin * pot.cwiseProduct(psi.amplitudes).matrix();
    if (s % record_stride == 0 || s == steps) {
      out.times.push_back(s * dt);
      out.densities.push_back(psi.density());
    }
  }
  out.final_state = psi;
  return out;
}

LocalWavefunction adiabatic_prepare(const QumodeGrid& g, double omega,
                                    double center, const Potential& p_target,
                                    int m_blocks, double dt) {
  if (m_blocks < 1) throw std::invalid_argument("adiabatic_prepare: M must be >= 1");
  if (dt <= 0) throw std::invalid_argument("adiabatic_prepare: dt must be > 0");

  MatrixXcd kin = hermitian_exp(real_p2_half(g), Complex(0.0, -dt));
  VectorXcd sho_gate(g.d);
  VectorXd residual(g.d);  // v1 + v_lift = target (with lift) minus the SHO reference
  for (int j = 0; j < g.d; ++j) {
    double q = g.points[j];
    double x = q - center;
    double sho = 0.5 * omega * omega * x * x;
    sho_gate[j] = std::exp(Complex(0.0, -dt * sho));
    residual[j] = p_target.value(q) - sho;
  }

  LocalWavefunction psi = sho_ground_state(g, omega, center);
  for (int r = 1; r <= m_blocks; ++r) {
    double s = double(r) / m_blocks;
    for (int j = 0; j < g.d; ++j) {
      Complex ramp = std::exp(Complex(0.0, -dt * s * residual[j]));
      psi.amplitudes[j] *= sho_gate[j] * ramp;
    }
    psi.amplitudes = kin * psi.amplitudes;
  }
  psi.normalize();
  return psi;
}

}  // namespace qulat
