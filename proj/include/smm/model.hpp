#pragma once

#include <vector>

#include "smm/linalg.hpp"

namespace smm {

/// Cluster or subcomponent labels. Zero-based in the C++ API; file formats and
/// the Python module use one-based labels.
using Labels = std::vector<int>;

/// N x r observations with cached summaries: unbiased sample covariance and
/// per-dimension range.
class DataSet {
 public:
  /// Validates and summarizes raw observations. Throws DegenerateData for
  /// N < 2, non-finite entries, or a constant column.
  static DataSet from_rows(RowMatrix observations);

  const RowMatrix& observations() const { return obs_; }
  int size() const { return static_cast<int>(obs_.rows()); }
  int dim() const { return static_cast<int>(obs_.cols()); }

  const Matrix& covariance() const { return cov_; }
  const Vector& minimum() const { return min_; }
  const Vector& maximum() const { return max_; }
  /// Per-coordinate range midpoint (min + max) / 2.
  Vector midpoint() const { return 0.5 * (min_ + max_); }

 private:
  RowMatrix obs_;
  Matrix cov_;
  Vector min_;
  Vector max_;
};

inline DataSet data_summaries(RowMatrix observations) {
  return DataSet::from_rows(std::move(observations));
}

/// Variance split: phi_B between clusters, phi_W between subcomponents of the
/// within-cluster part. Both strictly inside (0, 1).
class Proportions {
 public:
  Proportions(double phi_b, double phi_w);
  double phi_b() const { return phi_b_; }
  double phi_w() const { return phi_w_; }

 private:
  double phi_b_;
  double phi_w_;
};

enum class Variant {
  Hierarchical,
  /// C0k held at g0 * G0^-1 and lambda_kj = 1 (no hyperpriors on either).
  FixedC0Lambda1,
};

struct FixedHyperparameters {
  double e0 = 0.001;
  double d0 = 0.0;
  double c0 = 0.0;
  double g0 = 0.0;
  Matrix G0_inv;  // diagonal; E(C0k) = g0 * G0_inv
  Matrix G0;      // inverse of G0_inv, the Wishart rate of C0k
  Matrix B0;      // diagonal
  Vector m0;
  Matrix M0;
  double nu = 10.0;
  Variant variant = Variant::Hierarchical;

  int dim() const { return static_cast<int>(m0.size()); }

  /// Throws InvalidConfig when an invariant does not hold.
  void validate() const;
};

/// Fills G0 from G0_inv and validates.
FixedHyperparameters make_hyperparameters(double e0, double d0, double c0, double g0,
                                          const Matrix& G0_inv, const Matrix& B0,
                                          const Vector& m0, const Matrix& M0, double nu,
                                          Variant variant);

/// Dimension of one cluster's parameter (weights, means, covariances):
/// L - 1 + L r (r + 3) / 2.
int theta_dimension(int L, int r);

/// Data-scaled default hyperparameters:
///   c0 = 2.5 + (r-1)/2,  g0 = 0.5 + (r-1)/2,
///   G0^-1 = (1-phi_W)(1-phi_B)(c0 - (r+1)/2) / g0 * diag(S_y),
///   B0 = phi_W (1-phi_B) diag(S_y),  m0 = range midpoint,  M0 = 10 S_y,
///   d0 = theta_dimension(L, r) / 2 + 2.
FixedHyperparameters derive_hyperparameters(const DataSet& data, int K, int L,
                                            const Proportions& props, double e0 = 0.001,
                                            double nu = 10.0,
                                            Variant variant = Variant::Hierarchical);

struct ClusterParams {
  Vector w;                  // L subcomponent weights
  std::vector<Vector> mu;    // L means
  std::vector<Matrix> sigma; // L covariances

  int subcomponents() const { return static_cast<int>(w.size()); }
};

struct MixtureParams {
  Vector eta;
  std::vector<ClusterParams> clusters;

  int clusters_count() const { return static_cast<int>(eta.size()); }
};

/// log p_k(y) = log sum_l w_kl N(y | mu_kl, Sigma_kl).
double log_cluster_density(const Vector& y, const ClusterParams& cluster);
double cluster_density(const Vector& y, int k, const MixtureParams& params);

/// sum_k eta_k p_k(y), evaluated hierarchically.
double log_mixture_density(const Vector& y, const MixtureParams& params);
double mixture_density(const Vector& y, const MixtureParams& params);

/// One component of the flattened K*L Gaussian mixture.
struct WeightedGaussian {
  double weight;
  Vector mean;
  Matrix cov;
};

/// Flat K*L component list with weights eta_k * w_kl.
std::vector<WeightedGaussian> expand_mixture(const MixtureParams& params);
double log_expanded_density(const Vector& y, const std::vector<WeightedGaussian>& comps);

/// Prior predictive probability that a new label joins an existing cluster
/// of size nk_minus among N-1 others: (nk_minus + e0) / (N - 1 + e0 K).
double prior_existing_cluster_prob(int nk_minus, int N, int K, double e0);

/// Prior predictive probability that a new label opens any of the
/// K - k0_minus empty clusters: e0 (K - k0_minus) / (N - 1 + e0 K).
double prior_new_cluster_prob(int k0_minus, int N, int K, double e0);

/// log p(S) for S ~ iid Categorical(eta), eta ~ Dir_K(e0), eta integrated out:
///   lgamma(K e0) - lgamma(N + K e0) - K0 lgamma(e0) + sum_{N_k>0} lgamma(N_k + e0).
/// Throws InvalidLabel for labels outside [0, K).
double log_partition_prior(const Labels& labels, int K, double e0);

/// Prior of the unlabeled partition induced by S: log_partition_prior plus
/// log K! / (K - K0)!. Invariant to relabeling clusters.
double log_partition_class_prior(const Labels& labels, int K, double e0);

}  // namespace smm
