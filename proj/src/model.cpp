#include "smm/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "smm/errors.hpp"

namespace smm {

DataSet DataSet::from_rows(RowMatrix observations) {
  const Eigen::Index n = observations.rows();
  const Eigen::Index r = observations.cols();
  if (n < 2) throw DegenerateData("data: need at least two observations");
  if (r < 1) throw DegenerateData("data: need at least one column");
  if (!observations.allFinite()) throw DegenerateData("data: non-finite entry");

  DataSet d;
  d.obs_ = std::move(observations);
  d.min_ = d.obs_.colwise().minCoeff().transpose();
  d.max_ = d.obs_.colwise().maxCoeff().transpose();
  const Vector mean = d.obs_.colwise().mean().transpose();
  const Matrix centered = d.obs_.rowwise() - mean.transpose();
  d.cov_ = symmetrized(centered.transpose() * centered / static_cast<double>(n - 1));
  for (Eigen::Index j = 0; j < r; ++j) {
    if (!(d.cov_(j, j) > 0.0) || d.min_[j] == d.max_[j]) {
      throw DegenerateData("data: column " + std::to_string(j + 1) + " is constant");
    }
  }
  return d;
}

Proportions::Proportions(double phi_b, double phi_w) : phi_b_(phi_b), phi_w_(phi_w) {
  if (!(phi_b > 0.0 && phi_b < 1.0)) throw InvalidConfig("phi_B must lie in (0, 1)");
  if (!(phi_w > 0.0 && phi_w < 1.0)) throw InvalidConfig("phi_W must lie in (0, 1)");
}

namespace {

bool is_positive_diagonal(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!(m(i, i) > 0.0)) return false;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

void FixedHyperparameters::validate() const {
  const int r = dim();
  const double half = 0.5 * static_cast<double>(r - 1);
  if (r < 1) throw InvalidConfig("hyperparameters: empty m0");
  if (!(e0 > 0.0) || !(d0 > 0.0) || !(nu > 0.0)) {
    throw InvalidConfig("hyperparameters: e0, d0 and nu must be positive");
  }
  if (!(c0 > 2.0 + half)) throw InvalidConfig("hyperparameters: c0 must exceed 2 + (r-1)/2");
  if (!(g0 > half)) throw InvalidConfig("hyperparameters: g0 must exceed (r-1)/2");
  if (G0_inv.rows() != r || !is_positive_diagonal(G0_inv)) {
    throw InvalidConfig("hyperparameters: G0^-1 must be diagonal with positive entries");
  }
  if (B0.rows() != r || !is_positive_diagonal(B0)) {
    throw InvalidConfig("hyperparameters: B0 must be diagonal with positive entries");
  }
  if (M0.rows() != r || M0.cols() != r) throw InvalidConfig("hyperparameters: M0 shape");
  cholesky(M0);
}

FixedHyperparameters make_hyperparameters(double e0, double d0, double c0, double g0,
                                          const Matrix& G0_inv, const Matrix& B0,
                                          const Vector& m0, const Matrix& M0, double nu,
                                          Variant variant) {
  FixedHyperparameters h;
  h.e0 = e0;
  h.d0 = d0;
  h.c0 = c0;
  h.g0 = g0;
  h.G0_inv = G0_inv;
  h.B0 = B0;
  h.m0 = m0;
  h.M0 = M0;
  h.nu = nu;
  h.variant = variant;
  h.validate();
  h.G0 = Matrix(G0_inv.diagonal().cwiseInverse().asDiagonal());
  return h;
}

int theta_dimension(int L, int r) {
  if (L < 1 || r < 1) throw InvalidCount("theta_dimension: L and r must be positive");
  return L - 1 + L * r * (r + 3) / 2;
}

FixedHyperparameters derive_hyperparameters(const DataSet& data, int K, int L,
                                            const Proportions& props, double e0, double nu,
                                            Variant variant) {
  if (K < 1 || L < 1) throw InvalidConfig("derive_hyperparameters: K and L must be positive");
  const int r = data.dim();
  const double rd = static_cast<double>(r);
  const double c0 = 2.5 + (rd - 1.0) / 2.0;
  const double g0 = 0.5 + (rd - 1.0) / 2.0;
  const Vector diag_sy = data.covariance().diagonal();
  const double within = (1.0 - props.phi_w()) * (1.0 - props.phi_b());
  const Matrix G0_inv = Matrix((within * (c0 - (rd + 1.0) / 2.0) / g0 * diag_sy).asDiagonal());
  const Matrix B0 = Matrix((props.phi_w() * (1.0 - props.phi_b()) * diag_sy).asDiagonal());
  const double d0 = static_cast<double>(theta_dimension(L, r)) / 2.0 + 2.0;
  return make_hyperparameters(e0, d0, c0, g0, G0_inv, B0, data.midpoint(),
                              10.0 * data.covariance(), nu, variant);
}

double log_cluster_density(const Vector& y, const ClusterParams& cluster) {
  const int L = cluster.subcomponents();
  std::vector<double> terms(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    const double lw = std::log(cluster.w[l]);
    terms[l] = lw == -std::numeric_limits<double>::infinity()
                   ? lw
                   : lw + log_mvn_density(y, cluster.mu[l], cholesky(cluster.sigma[l]));
  }
  return log_sum_exp(terms.data(), L);
}

double cluster_density(const Vector& y, int k, const MixtureParams& params) {
  return std::exp(log_cluster_density(y, params.clusters.at(static_cast<std::size_t>(k))));
}

double log_mixture_density(const Vector& y, const MixtureParams& params) {
  const int K = params.clusters_count();
  std::vector<double> terms(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double le = std::log(params.eta[k]);
    terms[k] = le == -std::numeric_limits<double>::infinity()
                   ? le
                   : le + log_cluster_density(y, params.clusters[k]);
  }
  return log_sum_exp(terms.data(), K);
}

double mixture_density(const Vector& y, const MixtureParams& params) {
  return std::exp(log_mixture_density(y, params));
}

std::vector<WeightedGaussian> expand_mixture(const MixtureParams& params) {
  std::vector<WeightedGaussian> out;
  for (int k = 0; k < params.clusters_count(); ++k) {
    const ClusterParams& c = params.clusters[k];
    for (int l = 0; l < c.subcomponents(); ++l) {
      out.push_back({params.eta[k] * c.w[l], c.mu[l], c.sigma[l]});
    }
  }
  return out;
}

double log_expanded_density(const Vector& y, const std::vector<WeightedGaussian>& comps) {
  std::vector<double> terms;
  terms.reserve(comps.size());
  for (const auto& c : comps) {
    terms.push_back(c.weight > 0.0
                        ? std::log(c.weight) + log_mvn_density(y, c.mean, cholesky(c.cov))
                        : -std::numeric_limits<double>::infinity());
  }
  return log_sum_exp(terms.data(), static_cast<int>(terms.size()));
}

double prior_existing_cluster_prob(int nk_minus, int N, int K, double e0) {
  if (nk_minus <= 0 || nk_minus > N - 1 || K < 1) {
    throw InvalidCount("prior_existing_cluster_prob: need 0 < N_k <= N - 1");
  }
  return (nk_minus + e0) / (N - 1 + e0 * K);
}

double prior_new_cluster_prob(int k0_minus, int N, int K, double e0) {
  if (k0_minus < 0 || k0_minus > K || N < 1) {
    throw InvalidCount("prior_new_cluster_prob: need 0 <= K0 <= K");
  }
  return e0 * (K - k0_minus) / (N - 1 + e0 * K);
}

double log_partition_prior(const Labels& labels, int K, double e0) {
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int s : labels) {
    if (s < 0 || s >= K) throw InvalidLabel("log_partition_prior: label out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  const double n = static_cast<double>(labels.size());
  double out = std::lgamma(K * e0) - std::lgamma(n + K * e0);
  for (int c : counts) {
    if (c > 0) out += std::lgamma(c + e0) - std::lgamma(e0);
  }
  return out;
}

double log_partition_class_prior(const Labels& labels, int K, double e0) {
  std::vector<bool> used(static_cast<std::size_t>(K), false);
  const double base = log_partition_prior(labels, K, e0);
  int k0 = 0;
  for (int s : labels) {
    if (!used[static_cast<std::size_t>(s)]) {
      used[static_cast<std::size_t>(s)] = true;
      ++k0;
    }
  }
  // log K! / (K - K0)!
  return base + std::lgamma(K + 1.0) - std::lgamma(K - k0 + 1.0);
}

}  // namespace smm
