#include "smm/linalg.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "smm/errors.hpp"

namespace smm {
namespace {

std::optional<Matrix> try_cholesky(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix l = llt.matrixL();
  if (!l.allFinite()) return std::nullopt;
  return l;
}

}  // namespace

Matrix cholesky(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NotSymmetric("cholesky: matrix must be square and non-empty");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NotSymmetric("cholesky: matrix is not symmetric");
  }
  if (auto l = try_cholesky(m)) return *l;

  const double jitter = 1e-10 * m.trace() / static_cast<double>(m.rows());
  if (jitter > 0.0) {
    Matrix inflated = m;
    inflated.diagonal().array() += jitter;
    if (auto l = try_cholesky(inflated)) return *l;
  }
  throw NotPositiveDefinite("cholesky: matrix is not positive definite");
}

double half_log_det(const Matrix& chol_lower) {
  return chol_lower.diagonal().array().log().sum();
}

Matrix spd_inverse(const Matrix& m) {
  const Matrix l = cholesky(m);
  const Matrix l_inv = l.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(m.rows(), m.cols()));
  return symmetrized(l_inv.transpose() * l_inv);
}

double log_mvn_density(const Vector& y, const Vector& mean, const Matrix& chol_lower) {
  const Vector z = chol_lower.triangularView<Eigen::Lower>().solve(y - mean);
  const double r = static_cast<double>(y.size());
  return -0.5 * r * kLog2Pi - half_log_det(chol_lower) - 0.5 * z.squaredNorm();
}

double log_sum_exp(const double* values, int n) {
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) top = std::max(top, values[i]);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(values[i] - top);
  return top + std::log(s);
}

}  // namespace smm
