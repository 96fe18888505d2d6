#include "smm/density_table.hpp"

#include <cmath>
#include <limits>

namespace smm {

DensityTable::DensityTable(const MixtureParams& params)
    : K_(params.clusters_count()),
      L_(K_ > 0 ? params.clusters.front().subcomponents() : 0),
      r_(K_ > 0 && L_ > 0 ? static_cast<int>(params.clusters.front().mu.front().size()) : 0) {
  const auto kl = static_cast<std::size_t>(K_) * static_cast<std::size_t>(L_);
  const auto r = static_cast<std::size_t>(r_);
  log_eta_.resize(static_cast<std::size_t>(K_));
  log_const_.resize(kl);
  mean_.resize(kl * r);
  chol_.assign(kl * r * r, 0.0);

  for (int k = 0; k < K_; ++k) {
    log_eta_[k] = std::log(params.eta[k]);
    const ClusterParams& c = params.clusters[k];
    for (int l = 0; l < L_; ++l) {
      const std::size_t idx = static_cast<std::size_t>(k) * L_ + l;
      const Matrix chol = cholesky(c.sigma[l]);
      log_const_[idx] = std::log(c.w[l]) - 0.5 * r_ * kLog2Pi - half_log_det(chol);
      for (int a = 0; a < r_; ++a) {
        mean_[idx * r + a] = c.mu[l][a];
        for (int b = 0; b <= a; ++b) chol_[(idx * r + a) * r + b] = chol(a, b);
      }
    }
  }
}

double DensityTable::log_gaussian(const double* y, std::size_t kl) const {
  const auto r = static_cast<std::size_t>(r_);
  const double* m = &mean_[kl * r];
  const double* l = &chol_[kl * r * r];
  thread_local std::vector<double> z;
  if (z.size() < r) z.resize(r);
  double quad = 0.0;
  // forward substitution L z = y - mu
  for (std::size_t a = 0; a < r; ++a) {
    double v = y[a] - m[a];
    for (std::size_t b = 0; b < a; ++b) v -= l[a * r + b] * z[b];
    v /= l[a * r + a];
    z[a] = v;
    quad += v * v;
  }
  return log_const_[kl] - 0.5 * quad;
}

void DensityTable::subcomponent_log_terms(const double* y, int k, double* out) const {
  const std::size_t base = static_cast<std::size_t>(k) * L_;
  for (int l = 0; l < L_; ++l) out[l] = log_gaussian(y, base + l);
}

double DensityTable::log_cluster_density(const double* y, int k) const {
  double buf[64];
  std::vector<double> heap;
  double* terms = buf;
  if (L_ > 64) {
    heap.resize(static_cast<std::size_t>(L_));
    terms = heap.data();
  }
  subcomponent_log_terms(y, k, terms);
  return log_sum_exp(terms, L_);
}

void DensityTable::weighted_cluster_log_terms(const double* y, double* out) const {
  for (int k = 0; k < K_; ++k) {
    out[k] = log_eta_[k] == -std::numeric_limits<double>::infinity()
                 ? log_eta_[k]
                 : log_eta_[k] + log_cluster_density(y, k);
  }
}

}  // namespace smm
