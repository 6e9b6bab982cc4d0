#pragma once

#include <complex>
#include <Eigen/Dense>

namespace qulat {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Result of a truncated singular value decomposition theta ~= U * diag(S) * Vh.
/// `discarded` is the squared singular weight removed, relative to the total
/// squared weight of theta. Kept singular values are NOT renormalized here.
struct TruncatedSVD {
  MatrixXcd U;      // rows(theta) x chi
  VectorXd S;       // chi, descending
  MatrixXcd Vh;     // chi x cols(theta)
  double discarded = 0.0;
};

/// SVD with truncation by bond cap and relative squared-weight cutoff.
///
/// chi_max <= 0 means unbounded. cutoff is the maximum relative squared weight
/// that may be discarded (0 keeps everything above numerical noise).
///
/// Backend: cutoff == 0 uses a full divide-and-conquer SVD so that null-space
/// factors stay orthonormal; truncating calls go through a Gram-matrix
/// eigendecomposition, which is substantially faster and accurate for every
/// singular value large enough to survive the cutoff.
TruncatedSVD svd_truncate(const MatrixXcd& theta, int chi_max, double cutoff);

/// Singular values only (descending).
VectorXd singular_values(const MatrixXcd& theta);

/// exp(scale * H) for Hermitian H via eigendecomposition.
MatrixXcd hermitian_exp(const MatrixXd& h, Complex scale);

}  // namespace qulat
