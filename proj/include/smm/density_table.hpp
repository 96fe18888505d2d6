#pragma once

#include <vector>

#include "smm/model.hpp"

namespace smm {

/// Per-subcomponent Cholesky factors and normalizing constants of one
/// parameter set, laid out flat for the per-observation loops.
class DensityTable {
 public:
  explicit DensityTable(const MixtureParams& params);

  int clusters() const { return K_; }
  int subcomponents() const { return L_; }
  int dim() const { return r_; }

  double log_eta(int k) const { return log_eta_[static_cast<std::size_t>(k)]; }

  /// out[l] = log w_kl + log N(y | mu_kl, Sigma_kl), l = 0..L-1.
  void subcomponent_log_terms(const double* y, int k, double* out) const;

  double log_cluster_density(const double* y, int k) const;

  /// out[k] = log eta_k + log p_k(y), k = 0..K-1.
  void weighted_cluster_log_terms(const double* y, double* out) const;

 private:
  double log_gaussian(const double* y, std::size_t kl) const;

  int K_;
  int L_;
  int r_;
  std::vector<double> log_eta_;
  std::vector<double> log_const_;  // log w_kl - r/2 log 2pi - 1/2 log|Sigma_kl|
  std::vector<double> mean_;       // (K*L) x r
  std::vector<double> chol_;       // (K*L) x r x r, lower, row-major
};

}  // namespace smm
