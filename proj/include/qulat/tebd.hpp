#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qulat/mps.hpp"
#include "qulat/potential.hpp"
#include "qulat/qumode.hpp"

namespace qulat {

enum class EvolutionMode { Real, Imaginary };

/// Gate ordering for one second-order step.
///   OddEven: site gates (dt/2); odd-bond hops (dt/2); even-bond hops (dt);
///            odd-bond hops (dt/2); site gates (dt/2).
///   Sweep:   site gates (dt/2); left-to-right hop sweep (dt/2);
///            right-to-left hop sweep (dt/2); site gates (dt/2).
/// All hop gates commute (they are diagonal in the position product basis),
/// so the orderings differ only through truncation order.
enum class GateOrdering { OddEven, Sweep };

/// Precomputed gates for one Trotter step of the lattice Hamiltonian
///   sum_n [ (a/2) p_n^2 + c_n q_n^2/a + a v(q_n) ] - (1/a) sum_n q_n q_{n+1}.
/// Site gates exponentiate the full local part in one dense d x d matrix;
/// hop gates are diagonal d^2 vectors exp(+s q_i q_j dt / a) with s = i in
/// real mode and s = 1 in imaginary mode (where dt is the imaginary step).
struct GateSet {
  QumodeGrid grid;
  Potential potential = Potential::sho(1.0, 0.0);
  double a = 1.0;
  double dt = 0.0;
  EvolutionMode mode = EvolutionMode::Real;
  GateOrdering ordering = GateOrdering::OddEven;
  bool boundary_corrected = false;

  MatrixXcd site_half_bulk;   // exp(-(i) H_loc dt/2)
  MatrixXcd site_half_edge;   // ends, when boundary_corrected
  VectorXcd hop_full;         // d^2 diagonal
  VectorXcd hop_half;

  const MatrixXcd& site_half(int site, int n_sites) const;
  /// Dense d^2 x d^2 form of the hop gate (for oracle tests).
  MatrixXcd hop_full_dense() const;
};

GateSet build_gates(const QumodeGrid& g, const Potential& p, double a, double dt,
                    EvolutionMode mode, GateOrdering ordering,
                    bool boundary_corrected);

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<std::vector<double>> field_expectations;  // times x N
  std::vector<std::vector<double>> entropies;           // times x (N-1)
  std::vector<double> truncation_history;               // cumulative, per record
  std::vector<double> energy_history;                   // per step, imaginary mode
  std::vector<int> max_bond_history;                    // per record
};

/// One full second-order step; returns the summed discarded weight.
double step(MPSState& s, const GateSet& gates, const TruncationPolicy& policy);

/// Real-time TEBD for ceil(t_total/dt) steps, recording field expectations,
/// per-bond entropy and cumulative truncation every record_stride steps.
EvolutionRecord evolve_real(MPSState& s, const GateSet& gates,
                            const TruncationPolicy& policy, double t_total,
                            int record_stride);

struct ImaginaryOptions {
  int max_steps = 2000;
  double energy_tol = 1e-8;
  int window = 10;            // plateau detection window, in steps
  bool geometric_decay = false;  // halve dt on plateau instead of stopping
  double min_dt = 1e-4;
  int measure_stride = 1;
};

struct ImaginaryResult {
  EvolutionRecord record;
  bool converged = false;
  double final_energy = 0.0;
  double final_dt = 0.0;
};

/// Imaginary-time projection: step, renormalize, measure energy; stops when
/// the energy varies by less than energy_tol over the trailing window (or
/// halves the step and continues, with geometric_decay). Non-convergence at
/// max_steps is reported in the result, not thrown.
ImaginaryResult evolve_imaginary(MPSState& s, const GateSet& gates,
                                 const TruncationPolicy& policy,
                                 const ImaginaryOptions& opts);

/// Single-site phase gates exp(i profile_n q) at every site.
void momentum_kick(MPSState& s, const QumodeGrid& g, const std::vector<double>& profile);

}  // namespace qulat
