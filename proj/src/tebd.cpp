#include "qulat/tebd.hpp"

#include <cmath>
#include <stdexcept>

namespace qulat {

namespace {

MatrixXd local_hamiltonian(const QumodeGrid& g, const Potential& p, double a, double c) {
  MatrixXd h = MatrixXd::Zero(g.d, g.d);
  double w = 0.5 * a / (g.dq * g.dq);
  for (int j = 0; j < g.d; ++j) {
    h(j, j) = 2.0 * w;
    if (j + 1 < g.d) {
      h(j, j + 1) = -w;
      h(j + 1, j) = -w;
    }
  }
  for (int j = 0; j < g.d; ++j) {
    double q = g.points[j];
    h(j, j) += c * q * q / a + a * p.value(q);
  }
  return h;
}

VectorXcd hop_diag(const QumodeGrid& g, double a, double dt, EvolutionMode mode) {
  VectorXcd gd(g.d * g.d);
  for (int j = 0; j < g.d; ++j)
    for (int i = 0; i < g.d; ++i) {
      double x = g.points[i] * g.points[j] * dt / a;
      gd[i + g.d * j] = (mode == EvolutionMode::Real)
                            ? std::exp(Complex(0.0, x))
                            : Complex(std::exp(x), 0.0);
    }
  return gd;
}

}  // namespace

const MatrixXcd& GateSet::site_half(int site, int n_sites) const {
  if (boundary_corrected && (site == 0 || site == n_sites - 1)) return site_half_edge;
  return site_half_bulk;
}

MatrixXcd GateSet::hop_full_dense() const {
  MatrixXcd m = MatrixXcd::Zero(hop_full.size(), hop_full.size());
  for (int k = 0; k < hop_full.size(); ++k) m(k, k) = hop_full[k];
  return m;
}

GateSet build_gates(const QumodeGrid& g, const Potential& p, double a, double dt,
                    EvolutionMode mode, GateOrdering ordering,
                    bool boundary_corrected) {
  if (dt <= 0) throw std::invalid_argument("build_gates: dt must be > 0");
  if (a <= 0) throw std::invalid_argument("build_gates: a must be > 0");
  GateSet gs;
  gs.grid = g;
  gs.potential = p;
  gs.a = a;
  gs.dt = dt;
  gs.mode = mode;
  gs.ordering = ordering;
  gs.boundary_corrected = boundary_corrected;

  Complex scale = (mode == EvolutionMode::Real) ? Complex(0.0, -0.5 * dt)
                                                : Complex(-0.5 * dt, 0.0);
  gs.site_half_bulk = hermitian_exp(local_hamiltonian(g, p, a, 1.0), scale);
  gs.site_half_edge = boundary_corrected
                          ? hermitian_exp(local_hamiltonian(g, p, a, 0.5), scale)
                          : gs.site_half_bulk;
  gs.hop_full = hop_diag(g, a, dt, mode);
  gs.hop_half = hop_diag(g, a, 0.5 * dt, mode);
  return gs;
}

namespace {

void site_layer(MPSState& s, const GateSet& gates) {
  const int n_sites = s.size();
  for (int n = 0; n < n_sites; ++n) s.apply_single_site(n, gates.site_half(n, n_sites));
  // Non-unitary site gates break the canonical form.
  if (gates.mode == EvolutionMode::Imaginary) s.canonicalize(0);
}

// Gates within a parity layer commute, so sweep direction is free; zigzag
// layers keep the orthogonality center from walking the whole chain between
// them.
double hop_layer_parity(MPSState& s, const GateSet& gates, const TruncationPolicy& policy,
                        int parity, const VectorXcd& gd, bool ascending) {
  double w = 0.0;
  if (ascending) {
    for (int n = parity; n + 1 < s.size(); n += 2) w += s.apply_two_site_diag(n, gd, policy);
  } else {
    int last = parity;
    while (last + 2 + 1 < s.size()) last += 2;
    for (int n = last; n >= parity; n -= 2)
      w += s.apply_two_site_diag(n, gd, policy, /*leave_left=*/true);
  }
  return w;
}

}  // namespace

double step(MPSState& s, const GateSet& gates, const TruncationPolicy& policy) {
  if (gates.grid.d != s.phys_dim()) throw std::invalid_argument("step: dimension mismatch");
  double w = 0.0;
  site_layer(s, gates);
  if (s.size() > 1) {
    if (gates.ordering == GateOrdering::OddEven) {
      w += hop_layer_parity(s, gates, policy, 1, gates.hop_half, true);
      w += hop_layer_parity(s, gates, policy, 0, gates.hop_full, false);
      w += hop_layer_parity(s, gates, policy, 1, gates.hop_half, true);
    } else {
      for (int n = 0; n + 1 < s.size(); ++n)
        w += s.apply_two_site_diag(n, gates.hop_half, policy);
      for (int n = s.size() - 2; n >= 0; --n)
        w += s.apply_two_site_diag(n, gates.hop_half, policy, /*leave_left=*/true);
    }
  }
  site_layer(s, gates);
  return w;
}

namespace {

void record_snapshot(MPSState& s, const QumodeGrid& g, double t, EvolutionRecord& rec) {
  MatrixXcd q = position_operator(g).matrix;
  auto vals = s.site_expectations(q);
  std::vector<double> row(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) row[i] = vals[i].real();
  rec.times.push_back(t);
  rec.field_expectations.push_back(std::move(row));
  rec.entropies.push_back(s.all_entropies());
  rec.truncation_history.push_back(s.cumulative_truncation());
  rec.max_bond_history.push_back(s.max_bond_dim());
}

}  // namespace

EvolutionRecord evolve_real(MPSState& s, const GateSet& gates,
                            const TruncationPolicy& policy, double t_total,
                            int record_stride) {
  if (gates.mode != EvolutionMode::Real)
    throw std::invalid_argument("evolve_real: gate set is not real-mode");
  if (record_stride < 1) record_stride = 1;
  EvolutionRecord rec;
  record_snapshot(s, gates.grid, 0.0, rec);
  int steps = (t_total > 0) ? static_cast<int>(std::ceil(t_total / gates.dt - 1e-12)) : 0;
  for (int k = 1; k <= steps; ++k) {
    step(s, gates, policy);
    if (k % record_stride == 0 || k == steps)
      record_snapshot(s, gates.grid, k * gates.dt, rec);
  }
  return rec;
}

ImaginaryResult evolve_imaginary(MPSState& s, const GateSet& gates,
                                 const TruncationPolicy& policy,
                                 const ImaginaryOptions& opts) {
  if (gates.mode != EvolutionMode::Imaginary)
    throw std::invalid_argument("evolve_imaginary: gate set is not imaginary-mode");
  ImaginaryResult out;
  out.final_dt = gates.dt;

  GateSet active = gates;
  std::vector<double>& hist = out.record.energy_history;
  int measured_since_decay = 0;
  double tau = 0.0;
  for (int k = 0; k < opts.max_steps; ++k) {
    step(s, active, policy);
    s.normalize();
    tau += active.dt;
    if ((k + 1) % opts.measure_stride != 0 && k + 1 != opts.max_steps) continue;
    record_snapshot(s, active.grid, tau, out.record);
    double e = lattice_energy(s, active.grid, active.potential, active.a,
                              active.boundary_corrected);
    hist.push_back(e);
    ++measured_since_decay;
    if (measured_since_decay > opts.window && static_cast<int>(hist.size()) > opts.window) {
      double lo = hist.back(), hi = hist.back();
      for (int j = 0; j < opts.window; ++j) {
        double v = hist[hist.size() - 1 - j];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo < opts.energy_tol) {
        if (opts.geometric_decay && active.dt * 0.5 >= opts.min_dt) {
          active = build_gates(active.grid, active.potential, active.a, active.dt * 0.5,
                               EvolutionMode::Imaginary, active.ordering,
                               active.boundary_corrected);
          out.final_dt = active.dt;
          measured_since_decay = 0;
          continue;
        }
        out.converged = true;
        break;
      }
    }
  }
  out.final_energy = hist.empty() ? 0.0 : hist.back();
  return out;
}

void momentum_kick(MPSState& s, const QumodeGrid& g, const std::vector<double>& profile) {
  if (static_cast<int>(profile.size()) != s.size())
    throw std::invalid_argument("momentum_kick: profile length mismatch");
  MatrixXcd gate = MatrixXcd::Zero(g.d, g.d);
  for (int n = 0; n < s.size(); ++n) {
    for (int j = 0; j < g.d; ++j)
      gate(j, j) = std::exp(Complex(0.0, profile[n] * g.points[j]));
    s.apply_single_site(n, gate);
  }
}

}  // namespace qulat
