#include "qulat/mps.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace qulat {

namespace {

using Map = Eigen::Map<MatrixXcd>;
using CMap = Eigen::Map<const MatrixXcd>;

// (chiL*d) x chiR buffer seen as chiL x (d*chiR); same memory, column-major.
CMap wide_view(const MatrixXcd& t, int chi_l) {
  return CMap(t.data(), chi_l, t.size() / chi_l);
}

MatrixXcd reshape_tall(const MatrixXcd& m, int rows, int cols) {
  if (m.size() != static_cast<Eigen::Index>(rows) * cols)
    throw std::logic_error("reshape size mismatch");
  return CMap(m.data(), rows, cols);
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

MPSState::MPSState(const std::vector<LocalWavefunction>& locals) {
  if (locals.empty()) throw std::invalid_argument("product state: no sites");
  d_ = locals.front().grid.d;
  for (const auto& psi : locals) {
    if (psi.grid.d != d_)
      throw std::invalid_argument("product state: mismatched local dimensions");
    MatrixXcd t(d_, 1);
    VectorXcd a = psi.amplitudes;
    double n = a.norm();
    if (n <= 0) throw std::invalid_argument("product state: zero local state");
    t.col(0) = a / n;
    tensors_.push_back(std::move(t));
    chi_left_.push_back(1);
  }
  center_ = 0;
}

std::vector<int> MPSState::bond_dims() const {
  std::vector<int> dims;
  for (int n = 0; n + 1 < size(); ++n) dims.push_back(static_cast<int>(tensors_[n].cols()));
  return dims;
}

int MPSState::max_bond_dim() const {
  int m = 1;
  for (int b : bond_dims()) m = std::max(m, b);
  return m;
}

void MPSState::require_site(int n) const {
  if (n < 0 || n >= size()) throw std::out_of_range("mps: site index out of range");
}

void MPSState::shift_right(int n) {
  // QR of T_n; push R into T_{n+1}.
  MatrixXcd& t = tensors_[n];
  Eigen::HouseholderQR<MatrixXcd> qr(t);
  int k = static_cast<int>(std::min(t.rows(), t.cols()));
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(t.rows(), k);
  MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  t = q;
  int chi_m = chi_left_[n + 1];
  MatrixXcd next = r * wide_view(tensors_[n + 1], chi_m);
  tensors_[n + 1] = reshape_tall(next, k * d_, static_cast<int>(tensors_[n + 1].cols()));
  chi_left_[n + 1] = k;
  center_ = n + 1;
}

void MPSState::shift_left(int n) {
  // LQ of T_n (QR of the adjoint); push L into T_{n-1}.
  int chi_l = chi_left_[n];
  MatrixXcd wide = wide_view(tensors_[n], chi_l);  // chiL x (d chiR)
  Eigen::HouseholderQR<MatrixXcd> qr(wide.adjoint());
  int k = static_cast<int>(std::min(wide.rows(), wide.cols()));
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(wide.cols(), k);
  MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  // wide = (q r)^H = r^H q^H; the row-orthonormal part q^H becomes T_n.
  MatrixXcd qh = q.adjoint();  // k x (d chiR)
  tensors_[n] = reshape_tall(qh, k * d_, static_cast<int>(tensors_[n].cols()));
  chi_left_[n] = k;
  tensors_[n - 1] = tensors_[n - 1] * r.adjoint();  // (chiLL d) x k
  center_ = n - 1;
}

void MPSState::canonicalize(int center) {
  require_site(center);
  if (center_ < 0) {
    // Establish from scratch: left sweep to the last site, then walk back.
    center_ = 0;
    for (int n = 0; n + 1 < size(); ++n) shift_right(n);
    while (center_ > center) shift_left(center_);
    return;
  }
  while (center_ < center) shift_right(center_);
  while (center_ > center) shift_left(center_);
}

double MPSState::norm() {
  if (center_ < 0) canonicalize(0);
  return tensors_[center_].norm();
}

void MPSState::normalize() {
  double n = norm();
  if (n <= 0) throw std::runtime_error("mps: zero norm");
  tensors_[center_] /= n;
}

void MPSState::apply_single_site(int n, const MatrixXcd& u) {
  require_site(n);
  if (u.rows() != d_ || u.cols() != d_)
    throw std::invalid_argument("apply_single_site: gate dimension mismatch");
  MatrixXcd& t = tensors_[n];
  int chi_l = chi_left_[n];
  int chi_r = static_cast<int>(t.cols());
  MatrixXcd out(t.rows(), chi_r);
  for (int r = 0; r < chi_r; ++r) {
    CMap col(t.col(r).data(), chi_l, d_);
    Map(out.col(r).data(), chi_l, d_) = col * u.transpose();
  }
  t = std::move(out);
}

namespace {

// theta is (chiL*d) x (d*chiR) with row l + chiL*i and column j + d*r.
void scale_theta_diag(MatrixXcd& theta, const VectorXcd& gd, int chi_l, int d) {
  const int cols = static_cast<int>(theta.cols());
  for (int c = 0; c < cols; ++c) {
    int j = c % d;
    for (int i = 0; i < d; ++i)
      theta.col(c).segment(static_cast<Eigen::Index>(i) * chi_l, chi_l) *= gd[i + d * j];
  }
}

void apply_theta_dense(MatrixXcd& theta, const MatrixXcd& gate, int chi_l, int d,
                       int chi_r) {
  // Permute to (d*d) x (chiL*chiR), multiply, permute back.
  MatrixXcd perm(d * d, chi_l * chi_r);
  for (int r = 0; r < chi_r; ++r)
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i)
        perm.row(i + d * j).segment(static_cast<Eigen::Index>(r) * chi_l, chi_l) =
            theta.col(j + d * r).segment(static_cast<Eigen::Index>(i) * chi_l, chi_l).transpose();
  MatrixXcd out = gate * perm;
  for (int r = 0; r < chi_r; ++r)
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i)
        theta.col(j + d * r).segment(static_cast<Eigen::Index>(i) * chi_l, chi_l) =
            out.row(i + d * j).segment(static_cast<Eigen::Index>(r) * chi_l, chi_l).transpose();
}

}  // namespace

double MPSState::apply_two_site(int n, const MatrixXcd& gate,
                                const TruncationPolicy& policy, bool leave_left) {
  if (gate.rows() != d_ * d_ || gate.cols() != d_ * d_)
    throw std::invalid_argument("apply_two_site: gate dimension mismatch");
  require_site(n + 1);
  if (center_ != n && center_ != n + 1) canonicalize(n);

  int chi_l = chi_left_[n];
  int chi_r = static_cast<int>(tensors_[n + 1].cols());
  int chi_m = chi_left_[n + 1];
  MatrixXcd theta = tensors_[n] * wide_view(tensors_[n + 1], chi_m);
  apply_theta_dense(theta, gate, chi_l, d_, chi_r);
  return split_theta_(theta, n, chi_l, chi_r, policy, leave_left);
}

double MPSState::apply_two_site_diag(int n, const VectorXcd& gate_diag,
                                     const TruncationPolicy& policy, bool leave_left) {
  if (gate_diag.size() != d_ * d_)
    throw std::invalid_argument("apply_two_site_diag: gate dimension mismatch");
  require_site(n + 1);
  if (center_ != n && center_ != n + 1) canonicalize(n);

  int chi_l = chi_left_[n];
  int chi_r = static_cast<int>(tensors_[n + 1].cols());
  int chi_m = chi_left_[n + 1];
  MatrixXcd theta = tensors_[n] * wide_view(tensors_[n + 1], chi_m);
  scale_theta_diag(theta, gate_diag, chi_l, d_);
  return split_theta_(theta, n, chi_l, chi_r, policy, leave_left);
}

double MPSState::split_theta_(MatrixXcd& theta, int n, int chi_l, int chi_r,
                              const TruncationPolicy& policy, bool leave_left) {
  TruncatedSVD svd = svd_truncate(theta, policy.chi_max, policy.cutoff);
  // Keep the state norm unchanged across the truncation.
  if (svd.discarded > 0.0 && svd.discarded < 1.0)
    svd.S /= std::sqrt(1.0 - svd.discarded);
  int chi = static_cast<int>(svd.S.size());
  if (leave_left) {
    tensors_[n] = svd.U * svd.S.asDiagonal();
    tensors_[n + 1] = reshape_tall(svd.Vh, chi * d_, chi_r);
    center_ = n;
  } else {
    tensors_[n] = svd.U;
    MatrixXcd sv = svd.S.asDiagonal() * svd.Vh;
    tensors_[n + 1] = reshape_tall(sv, chi * d_, chi_r);
    center_ = n + 1;
  }
  chi_left_[n + 1] = chi;
  cum_trunc_ += svd.discarded;
  return svd.discarded;
}

Complex MPSState::expectation(int n, const MatrixXcd& op) {
  require_site(n);
  if (op.rows() != d_ || op.cols() != d_)
    throw std::invalid_argument("expectation: operator dimension mismatch");
  canonicalize(n);
  const MatrixXcd& t = tensors_[n];
  int chi_l = chi_left_[n];
  Complex val = 0.0;
  double n2 = t.squaredNorm();
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) {
      if (op(a, b) == Complex(0.0)) continue;
      auto ta = t.middleRows(static_cast<Eigen::Index>(a) * chi_l, chi_l);
      auto tb = t.middleRows(static_cast<Eigen::Index>(b) * chi_l, chi_l);
      val += op(a, b) * (ta.conjugate().cwiseProduct(tb)).sum();
    }
  return val / n2;
}

std::vector<Complex> MPSState::correlation_row(int n, const MatrixXcd& opA,
                                               const MatrixXcd& opB) {
  require_site(n);
  canonicalize(n);
  const MatrixXcd& t0 = tensors_[n];
  int chi_l = chi_left_[n];
  double n2 = t0.squaredNorm();

  std::vector<Complex> out;
  // On-site value first: <opA opB>_n.
  {
    MatrixXcd ab = opA * opB;
    out.push_back(expectation(n, ab));
  }
  // Left environment carrying opA at n.
  int chi_r = static_cast<int>(t0.cols());
  MatrixXcd env = MatrixXcd::Zero(chi_r, chi_r);
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) {
      if (opA(a, b) == Complex(0.0)) continue;
      auto ta = t0.middleRows(static_cast<Eigen::Index>(a) * chi_l, chi_l);
      auto tb = t0.middleRows(static_cast<Eigen::Index>(b) * chi_l, chi_l);
      env += opA(a, b) * ta.adjoint() * tb;
    }
  for (int m = n + 1; m < size(); ++m) {
    const MatrixXcd& t = tensors_[m];
    int cl = chi_left_[m];
    Complex val = 0.0;
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b) {
        if (opB(a, b) == Complex(0.0)) continue;
        auto ta = t.middleRows(static_cast<Eigen::Index>(a) * cl, cl);
        auto tb = t.middleRows(static_cast<Eigen::Index>(b) * cl, cl);
        val += opB(a, b) * (ta.conjugate().cwiseProduct(env * tb)).sum();
      }
    out.push_back(val / n2);
    if (m + 1 < size()) {
      int cr = static_cast<int>(t.cols());
      MatrixXcd next = MatrixXcd::Zero(cr, cr);
      for (int i = 0; i < d_; ++i) {
        auto ti = t.middleRows(static_cast<Eigen::Index>(i) * cl, cl);
        next += ti.adjoint() * env * ti;
      }
      env = std::move(next);
    }
  }
  return out;
}

Complex MPSState::correlation(int n, int m, const MatrixXcd& opA, const MatrixXcd& opB) {
  if (n > m) throw std::invalid_argument("correlation: need n <= m");
  require_site(m);
  if (n == m) return expectation(n, opA * opB);
  canonicalize(n);
  const MatrixXcd& t0 = tensors_[n];
  int chi_l = chi_left_[n];
  double n2 = t0.squaredNorm();
  MatrixXcd env = MatrixXcd::Zero(t0.cols(), t0.cols());
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) {
      if (opA(a, b) == Complex(0.0)) continue;
      auto ta = t0.middleRows(static_cast<Eigen::Index>(a) * chi_l, chi_l);
      auto tb = t0.middleRows(static_cast<Eigen::Index>(b) * chi_l, chi_l);
      env += opA(a, b) * ta.adjoint() * tb;
    }
  for (int k = n + 1; k < m; ++k) {
    const MatrixXcd& t = tensors_[k];
    int cl = chi_left_[k];
    MatrixXcd next = MatrixXcd::Zero(t.cols(), t.cols());
    for (int i = 0; i < d_; ++i) {
      auto ti = t.middleRows(static_cast<Eigen::Index>(i) * cl, cl);
      next += ti.adjoint() * env * ti;
    }
    env = std::move(next);
  }
  const MatrixXcd& tm = tensors_[m];
  int cl = chi_left_[m];
  Complex val = 0.0;
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) {
      if (opB(a, b) == Complex(0.0)) continue;
      auto ta = tm.middleRows(static_cast<Eigen::Index>(a) * cl, cl);
      auto tb = tm.middleRows(static_cast<Eigen::Index>(b) * cl, cl);
      val += opB(a, b) * (ta.conjugate().cwiseProduct(env * tb)).sum();
    }
  return val / n2;
}

std::vector<Complex> MPSState::site_expectations(const MatrixXcd& op) {
  std::vector<Complex> out;
  canonicalize(0);
  for (int n = 0; n < size(); ++n) {
    out.push_back(expectation(n, op));
    if (n + 1 < size()) shift_right(n);
  }
  return out;
}

double MPSState::entanglement_entropy(int bond) {
  if (bond < 0 || bond + 1 >= size()) throw std::out_of_range("entropy: bond out of range");
  canonicalize(bond);
  VectorXd s = singular_values(tensors_[bond]);
  double total = s.squaredNorm();
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    double p = s[i] * s[i] / total;
    if (p > 1e-300) h -= p * std::log(p);
  }
  return h;
}

std::vector<double> MPSState::all_entropies() {
  std::vector<double> out;
  canonicalize(0);
  for (int b = 0; b + 1 < size(); ++b) {
    canonicalize(b);
    VectorXd s = singular_values(tensors_[b]);
    double total = s.squaredNorm();
    double h = 0.0;
    for (int i = 0; i < s.size(); ++i) {
      double p = s[i] * s[i] / std::max(total, 1e-300);
      if (p > 1e-300) h -= p * std::log(p);
    }
    out.push_back(h);
  }
  return out;
}

Complex MPSState::inner(const MPSState& other) const {
  if (other.size() != size() || other.d_ != d_)
    throw std::invalid_argument("inner: shape mismatch");
  MatrixXcd env = MatrixXcd::Ones(1, 1);
  for (int n = 0; n < size(); ++n) {
    int cl_a = chi_left_[n];
    int cl_b = other.chi_left_[n];
    const MatrixXcd& ta = tensors_[n];
    const MatrixXcd& tb = other.tensors_[n];
    MatrixXcd next = MatrixXcd::Zero(ta.cols(), tb.cols());
    for (int i = 0; i < d_; ++i) {
      auto ai = ta.middleRows(static_cast<Eigen::Index>(i) * cl_a, cl_a);
      auto bi = tb.middleRows(static_cast<Eigen::Index>(i) * cl_b, cl_b);
      next += ai.adjoint() * env * bi;
    }
    env = std::move(next);
  }
  return env(0, 0);
}

void MPSState::save(std::ostream& os, double grid_half_width) const {
  os.write("QMPS", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint8_t>(os, 1);  // little-endian payload
  put<std::uint64_t>(os, static_cast<std::uint64_t>(size()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(d_));
  put<double>(os, grid_half_width);
  for (int n = 0; n + 1 < size(); ++n)
    put<std::uint64_t>(os, static_cast<std::uint64_t>(tensors_[n].cols()));

  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (int n = 0; n < size(); ++n) {
    const MatrixXcd& t = tensors_[n];
    int chi_l = chi_left_[n];
    int chi_r = static_cast<int>(t.cols());
    for (int l = 0; l < chi_l; ++l)
      for (int i = 0; i < d_; ++i)
        for (int r = 0; r < chi_r; ++r) {
          Complex v = t(l + static_cast<Eigen::Index>(chi_l) * i, r);
          double re = v.real(), im = v.imag();
          os.write(reinterpret_cast<const char*>(&re), sizeof(double));
          os.write(reinterpret_cast<const char*>(&im), sizeof(double));
          hash = fnv1a(&re, sizeof(double), hash);
          hash = fnv1a(&im, sizeof(double), hash);
        }
  }
  put<std::uint64_t>(os, hash);
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

MPSState MPSState::load(std::istream& is, double* grid_half_width) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "QMPS", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  auto version = get<std::uint32_t>(is);
  if (version != 1) throw std::runtime_error("checkpoint: unsupported version");
  auto endian = get<std::uint8_t>(is);
  if (endian != 1) throw std::runtime_error("checkpoint: unsupported endianness");
  auto n_sites = static_cast<int>(get<std::uint64_t>(is));
  auto d = static_cast<int>(get<std::uint64_t>(is));
  double half_width = get<double>(is);
  if (n_sites < 1 || d < 2) throw std::runtime_error("checkpoint: bad header");

  std::vector<int> bonds(n_sites - 1);
  for (auto& b : bonds) b = static_cast<int>(get<std::uint64_t>(is));

  MPSState s;
  s.d_ = d;
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (int n = 0; n < n_sites; ++n) {
    int chi_l = (n == 0) ? 1 : bonds[n - 1];
    int chi_r = (n == n_sites - 1) ? 1 : bonds[n];
    MatrixXcd t(static_cast<Eigen::Index>(chi_l) * d, chi_r);
    for (int l = 0; l < chi_l; ++l)
      for (int i = 0; i < d; ++i)
        for (int r = 0; r < chi_r; ++r) {
          double re = get<double>(is);
          double im = get<double>(is);
          hash = fnv1a(&re, sizeof(double), hash);
          hash = fnv1a(&im, sizeof(double), hash);
          t(l + static_cast<Eigen::Index>(chi_l) * i, r) = Complex(re, im);
        }
    s.tensors_.push_back(std::move(t));
    s.chi_left_.push_back(chi_l);
  }
  auto stored = get<std::uint64_t>(is);
  if (stored != hash) throw std::runtime_error("checkpoint: checksum mismatch");
  s.center_ = -1;
  if (grid_half_width) *grid_half_width = half_width;
  return s;
}

double lattice_energy(MPSState& s, const QumodeGrid& g, const Potential& p,
                      double a, bool boundary_corrected) {
  const int n_sites = s.size();
  if (g.d != s.phys_dim()) throw std::invalid_argument("lattice_energy: grid mismatch");

  MatrixXcd p2 = momentum_squared_operator(g).matrix;
  MatrixXcd q = position_operator(g).matrix;

  double e = 0.0;
  s.canonicalize(0);
  for (int n = 0; n < n_sites; ++n) {
    MatrixXcd h_loc = 0.5 * a * p2;
    double c = onsite_coupling(n, n_sites, boundary_corrected);
    for (int j = 0; j < g.d; ++j)
      h_loc(j, j) += a * (c * g.points[j] * g.points[j] / (a * a) + p.value(g.points[j]));
    e += s.expectation(n, h_loc).real();
    if (n + 1 < n_sites) {
      e -= s.correlation(n, n + 1, q, q).real() / a;
      s.canonicalize(n + 1);
    }
  }
  return e;
}

}  // namespace qulat
