#include "qulat/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

namespace qulat {

namespace {

// Number of leading singular values to keep so that the discarded squared
// weight stays below cutoff * total, subject to the bond cap.
int kept_rank(const VectorXd& s2_desc, double total, int chi_max, double cutoff) {
  const int n = static_cast<int>(s2_desc.size());
  int cap = (chi_max > 0) ? std::min(chi_max, n) : n;
  double tail = 0.0;
  for (int k = cap; k < n; ++k) tail += s2_desc[k];
  int keep = cap;
  while (keep > 1) {
    double with_next = tail + s2_desc[keep - 1];
    if (with_next > cutoff * total) break;
    tail = with_next;
    --keep;
  }
  return std::max(keep, 1);
}

struct DenseSVD {
  MatrixXcd u, vh;
  VectorXd s;
};

DenseSVD lapack_svd(const MatrixXcd& a, bool vectors) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  const int k = std::min(m, n);
  DenseSVD out;
  out.s.resize(k);
  MatrixXcd work = a;
  int info;
  if (vectors) {
    out.u.resize(m, k);
    out.vh.resize(k, n);
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n,
                          reinterpret_cast<lapack_complex_double*>(work.data()), m,
                          out.s.data(),
                          reinterpret_cast<lapack_complex_double*>(out.u.data()), m,
                          reinterpret_cast<lapack_complex_double*>(out.vh.data()), k);
  } else {
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n,
                          reinterpret_cast<lapack_complex_double*>(work.data()), m,
                          out.s.data(), nullptr, m, nullptr, k);
  }
  if (info != 0) throw std::runtime_error("zgesdd failed, info=" + std::to_string(info));
  return out;
}

// Shared tail of the Gram route: pick the kept rank from the descending
// squared spectrum and form the missing factor.
template <typename MatrixT>
bool gram_finish(const MatrixT& theta, const VectorXd& evals_asc, const MatrixT& evecs,
                 double total, bool right, int chi_max, double cutoff,
                 MatrixT& u_out, VectorXd& s_out, MatrixT& vh_out, double& discarded) {
  const int want = static_cast<int>(evals_asc.size());
  VectorXd s2(want);
  for (int i = 0; i < want; ++i) s2[i] = std::max(evals_asc[want - 1 - i], 0.0);

  // Values that cannot be resolved through the Gram matrix are noise.
  const double floor = 1e-28 * total;
  int resolvable = want;
  while (resolvable > 1 && s2[resolvable - 1] < floor) --resolvable;

  VectorXd s2r = s2.head(resolvable);
  const int keep = kept_rank(s2r, total, chi_max, cutoff);

  s_out.resize(keep);
  for (int i = 0; i < keep; ++i) s_out[i] = std::sqrt(s2[i]);
  discarded = std::max(0.0, (total - s2.head(keep).sum()) / total);

  MatrixT v(evecs.rows(), keep);
  for (int i = 0; i < keep; ++i) v.col(i) = evecs.col(want - 1 - i);

  if (right) {
    vh_out = v.adjoint();
    u_out.noalias() = theta * v;
    for (int i = 0; i < keep; ++i) u_out.col(i) /= s_out[i];
  } else {
    u_out = v;
    vh_out.noalias() = v.adjoint() * theta;
    for (int i = 0; i < keep; ++i) vh_out.row(i) /= s_out[i];
  }
  return true;
}

bool gram_svd_real(const MatrixXd& theta, int chi_max, double cutoff, TruncatedSVD& out) {
  const int m = static_cast<int>(theta.rows());
  const int n = static_cast<int>(theta.cols());
  const bool right = n <= m;
  const int g = right ? n : m;

  MatrixXd gram = right ? MatrixXd(theta.transpose() * theta)
                        : MatrixXd(theta * theta.transpose());
  const double total = gram.trace();
  if (!(total > 0.0)) return false;

  const int want = (chi_max > 0) ? std::min(chi_max, g) : g;
  VectorXd evals(g);  // dsyevr requires the full-length eigenvalue buffer
  MatrixXd evecs(g, want);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(std::max(1, want)));
  lapack_int found = 0;
  lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', g, gram.data(), g, 0.0, 0.0,
                     g - want + 1, g, 0.0, &found, evals.data(), evecs.data(), g,
                     isuppz.data());
  if (info != 0 || found != want) return false;

  MatrixXd u, vh;
  VectorXd s;
  if (!gram_finish(theta, VectorXd(evals.head(want)), evecs, total, right, chi_max,
                   cutoff, u, s, vh, out.discarded))
    return false;
  out.U = u.cast<Complex>();
  out.S = s;
  out.Vh = vh.cast<Complex>();
  return true;
}

// Eigendecomposition of the Gram matrix on the smaller side. Returns false if
// the spectrum looks unreliable and the caller should fall back to zgesdd.
bool gram_svd(const MatrixXcd& theta, int chi_max, double cutoff, TruncatedSVD& out) {
  const int m = static_cast<int>(theta.rows());
  const int n = static_cast<int>(theta.cols());

  // Imaginary-time states and gates are purely real; a real eigensolve is
  // several times faster.
  if (theta.imag().cwiseAbs().maxCoeff() == 0.0)
    return gram_svd_real(theta.real(), chi_max, cutoff, out);

  const bool right = n <= m;
  const int g = right ? n : m;
  MatrixXcd gram = right ? MatrixXcd(theta.adjoint() * theta)
                         : MatrixXcd(theta * theta.adjoint());
  const double total = gram.real().trace();
  if (!(total > 0.0)) return false;

  const int want = (chi_max > 0) ? std::min(chi_max, g) : g;
  VectorXd evals(g);  // zheevr requires the full-length eigenvalue buffer
  MatrixXcd evecs(g, want);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(std::max(1, want)));
  lapack_int found = 0;
  lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'U', g,
      reinterpret_cast<lapack_complex_double*>(gram.data()), g,
      0.0, 0.0, g - want + 1, g, 0.0, &found, evals.data(),
      reinterpret_cast<lapack_complex_double*>(evecs.data()), g, isuppz.data());
  if (info != 0 || found != want) return false;

  return gram_finish(theta, VectorXd(evals.head(want)), evecs, total, right, chi_max,
                     cutoff, out.U, out.S, out.Vh, out.discarded);
}

}  // namespace

TruncatedSVD svd_truncate(const MatrixXcd& theta, int chi_max, double cutoff) {
  if (theta.rows() == 0 || theta.cols() == 0)
    throw std::invalid_argument("svd_truncate: empty matrix");

  TruncatedSVD out;
  if (cutoff > 0.0 && gram_svd(theta, chi_max, cutoff, out)) return out;

  DenseSVD f = lapack_svd(theta, true);
  VectorXd s2 = f.s.array().square();
  const double total = s2.sum();
  if (total <= 0.0) {
    out.U = f.u.leftCols(1);
    out.S = VectorXd::Zero(1);
    out.Vh = f.vh.topRows(1);
    out.discarded = 0.0;
    return out;
  }
  const int keep = kept_rank(s2, total, chi_max, cutoff);
  out.U = f.u.leftCols(keep);
  out.S = f.s.head(keep);
  out.Vh = f.vh.topRows(keep);
  out.discarded = std::max(0.0, (total - s2.head(keep).sum()) / total);
  return out;
}

VectorXd singular_values(const MatrixXcd& theta) {
  return lapack_svd(theta, false).s;
}

MatrixXcd hermitian_exp(const MatrixXd& h, Complex scale) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_exp: eigensolve failed");
  const VectorXd& w = es.eigenvalues();
  const MatrixXd& v = es.eigenvectors();
  VectorXcd phases(w.size());
  for (int i = 0; i < w.size(); ++i) phases[i] = std::exp(scale * w[i]);
  return v.cast<Complex>() * phases.asDiagonal() * v.transpose().cast<Complex>();
}

}  // namespace qulat
