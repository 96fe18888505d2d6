#pragma once

#include <Eigen/Dense>

namespace smm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

/// Lower-triangular Cholesky factor L with L * L^T = m.
///
/// If a pivot is non-positive, the factorization is retried exactly once with
/// 1e-10 * trace(m) / r added to the diagonal. A second failure throws
/// NotPositiveDefinite; repeated inflation would hide a diverging sampler.
/// Throws NotSymmetric when m is not symmetric to 1e-10 relative.
Matrix cholesky(const Matrix& m);

/// Sum of log diagonal entries of a Cholesky factor, i.e. 0.5 * log det(m).
double half_log_det(const Matrix& chol_lower);

/// Inverse of a symmetric positive definite matrix, symmetrized on output.
Matrix spd_inverse(const Matrix& m);

/// log N(y | mean, L L^T) given the lower Cholesky factor of the covariance.
double log_mvn_density(const Vector& y, const Vector& mean, const Matrix& chol_lower);

/// Maximum-shifted log(sum(exp(values))). Returns -inf for an all -inf input.
double log_sum_exp(const double* values, int n);

inline double log_sum_exp(const Vector& values) {
  return log_sum_exp(values.data(), static_cast<int>(values.size()));
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace smm
