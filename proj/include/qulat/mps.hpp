#pragma once

#include <iosfwd>
#include <vector>

#include "qulat/linalg.hpp"
#include "qulat/potential.hpp"
#include "qulat/qumode.hpp"

namespace qulat {

struct TruncationPolicy {
  int chi_max = 64;        // <= 0 means unbounded
  double cutoff = 1e-10;   // relative discarded squared weight per split
};

/// Open-boundary matrix product state over N sites of physical dimension d.
///
/// Site tensors are stored column-major as (chiL*d) x chiR matrices with row
/// index l + chiL*i (l left bond, i physical). A mixed-canonical form is
/// tracked: tensors left of the orthogonality center are left isometries,
/// tensors right of it right isometries. Measurements may move the center and
/// therefore require exclusive access.
class MPSState {
 public:
  /// Product state of local wavefunctions; bond dimension 1 everywhere.
  explicit MPSState(const std::vector<LocalWavefunction>& locals);

  int size() const { return static_cast<int>(tensors_.size()); }
  int phys_dim() const { return d_; }
  std::vector<int> bond_dims() const;
  int max_bond_dim() const;
  int ortho_center() const { return center_; }  // -1 when not established
  double cumulative_truncation() const { return cum_trunc_; }

  /// Move (or establish) the orthogonality center.
  void canonicalize(int center);

  double norm();
  void normalize();

  void apply_single_site(int n, const MatrixXcd& u);

  /// Contract a d^2 x d^2 gate into sites (n, n+1), split by SVD, truncate,
  /// and renormalize the kept singular values so the state norm is unchanged.
  /// The pair basis is flattened as i + d*j with i on site n. Returns the
  /// discarded squared weight relative to the total. The center is left on
  /// site n+1 unless leave_left is set.
  double apply_two_site(int n, const MatrixXcd& gate, const TruncationPolicy& policy,
                        bool leave_left = false);
  /// Same for a gate diagonal in the product basis (entries indexed i + d*j).
  double apply_two_site_diag(int n, const VectorXcd& gate_diag,
                             const TruncationPolicy& policy, bool leave_left = false);

  Complex expectation(int n, const MatrixXcd& op);
  /// <opA_n opB_m> for n <= m (raw two-point value; subtraction is the
  /// caller's business).
  Complex correlation(int n, int m, const MatrixXcd& opA, const MatrixXcd& opB);
  /// <opA_n opB_m> for every m in [n, N); one left-to-right transfer sweep.
  std::vector<Complex> correlation_row(int n, const MatrixXcd& opA, const MatrixXcd& opB);
  /// <op_n> for every site; one sweep.
  std::vector<Complex> site_expectations(const MatrixXcd& op);

  /// Von Neumann entropy of the Schmidt spectrum at a bond (0 .. N-2).
  double entanglement_entropy(int bond);
  std::vector<double> all_entropies();

  Complex inner(const MPSState& other) const;

  /// Binary snapshot: magic, version, endian tag, N, d, grid half-width,
  /// bond dims, then per-site (left, phys, right) row-major complex tensors,
  /// then a checksum of the tensor payload.
  void save(std::ostream& os, double grid_half_width) const;
  static MPSState load(std::istream& is, double* grid_half_width = nullptr);

  const MatrixXcd& tensor(int n) const { return tensors_[n]; }
  int left_dim(int n) const { return chi_left_[n]; }

 private:
  MPSState() = default;
  void shift_right(int n);  // center n -> n+1
  void shift_left(int n);   // center n -> n-1
  void require_site(int n) const;
  double split_theta_(MatrixXcd& theta, int n, int chi_l, int chi_r,
                      const TruncationPolicy& policy, bool leave_left);

  std::vector<MatrixXcd> tensors_;
  std::vector<int> chi_left_;
  int d_ = 0;
  int center_ = -1;
  double cum_trunc_ = 0.0;
};

/// Assembled lattice energy
///   sum_n [ (a/2) <p_n^2> + a <c_n q_n^2/a^2 + v(q_n)> ] - (1/a) sum <q_n q_{n+1}>
/// under the chosen boundary convention.
double lattice_energy(MPSState& s, const QumodeGrid& g, const Potential& p,
                      double a, bool boundary_corrected);

}  // namespace qulat
