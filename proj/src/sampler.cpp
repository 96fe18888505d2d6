#include "smm/sampler.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "smm/density_table.hpp"
#include "smm/errors.hpp"
#include "smm/kmeans.hpp"

namespace smm {

void ChainConfig::validate() const {
  if (K < 1 || L < 1) throw InvalidConfig("chain: K and L must be at least 1");
  if (iterations < 1) throw InvalidConfig("chain: iterations must be at least 1");
  if (burnin < 0) throw InvalidConfig("chain: burn-in must be non-negative");
  if (thin < 1) throw InvalidConfig("chain: thin must be at least 1");
}

int count_nonempty(const Labels& S, int K) {
  std::vector<bool> used(static_cast<std::size_t>(K), false);
  int n = 0;
  for (int s : S) {
    if (s < 0 || s >= K) throw InvalidLabel("count_nonempty: label out of range");
    if (!used[static_cast<std::size_t>(s)]) {
      used[static_cast<std::size_t>(s)] = true;
      ++n;
    }
  }
  return n;
}

Allocations init_allocations(const DataSet& data, int K, int L, Rng& rng) {
  constexpr int kMaxIter = 100;
  constexpr int kRestarts = 5;
  const RowMatrix& y = data.observations();
  const int n = data.size();
  if (K > n) throw InvalidCount("init_allocations: need N >= K");

  Allocations out;
  out.S = kmeans(y, K, kRestarts, kMaxIter, rng).labels;
  out.I.assign(static_cast<std::size_t>(n), 0);

  for (int k = 0; k < K; ++k) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (out.S[i] == k) members.push_back(i);
    }
    if (members.empty()) continue;
    const int m = static_cast<int>(members.size());
    if (m < L) {
      for (int j = 0; j < m; ++j) out.I[members[j]] = j % L;
      continue;
    }
    RowMatrix sub(m, y.cols());
    for (int j = 0; j < m; ++j) sub.row(j) = y.row(members[j]);
    const Labels inner = kmeans(sub, L, kRestarts, kMaxIter, rng).labels;
    for (int j = 0; j < m; ++j) out.I[members[j]] = inner[j];
  }
  return out;
}

Vector step_sample_eta(const Labels& S, int K, double e0, Rng& rng) {
  Vector conc = Vector::Constant(K, e0);
  for (int s : S) conc[s] += 1.0;
  return sample_dirichlet(conc, rng);
}

namespace {

Labels classify_clusters(const DataSet& data, const DensityTable& table, Rng& rng) {
  const int n = data.size();
  const int K = table.clusters();
  const RowMatrix& y = data.observations();
  std::vector<double> terms(static_cast<std::size_t>(K));
  Labels S(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    table.weighted_cluster_log_terms(y.row(i).data(), terms.data());
    const int k = sample_categorical_log(terms.data(), K, rng);
    if (k < 0) {
      throw AllZeroLikelihood("cluster classification: every cluster density underflows for "
                              "observation " + std::to_string(i + 1));
    }
    S[i] = k;
  }
  return S;
}

Labels classify_subcomponents(const DataSet& data, const Labels& S, const DensityTable& table,
                              Rng& rng) {
  const int n = data.size();
  const int L = table.subcomponents();
  const RowMatrix& y = data.observations();
  std::vector<double> terms(static_cast<std::size_t>(L));
  Labels I(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    table.subcomponent_log_terms(y.row(i).data(), S[i], terms.data());
    const int l = sample_categorical_log(terms.data(), L, rng);
    if (l < 0) {
      throw AllZeroLikelihood("subcomponent classification: every subcomponent density "
                              "underflows for observation " + std::to_string(i + 1));
    }
    I[i] = l;
  }
  return I;
}

Matrix diag_inverse(const Matrix& B0, const Vector& lambda) {
  return Matrix((B0.diagonal().array() * lambda.array()).cwiseInverse().matrix().asDiagonal());
}

}  // namespace

Labels step_classify_clusters(const DataSet& data, const MixtureParams& params, Rng& rng) {
  return classify_clusters(data, DensityTable(params), rng);
}

Labels step_classify_subcomponents(const DataSet& data, const Labels& S,
                                   const MixtureParams& params, Rng& rng) {
  return classify_subcomponents(data, S, DensityTable(params), rng);
}

Vector step_sample_weights(const Labels& I, const Labels& S, int k, int L, double d0, Rng& rng) {
  Vector conc = Vector::Constant(L, d0);
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S[i] == k) conc[I[i]] += 1.0;
  }
  return sample_dirichlet(conc, rng);
}

SubcomponentCovariances step_sample_sigmas(const DataSet& data, const Labels& S, const Labels& I,
                                           int k, const std::vector<Vector>& mus,
                                           const Matrix& C0k, double c0, Rng& rng) {
  const int L = static_cast<int>(mus.size());
  const int r = data.dim();
  const RowMatrix& y = data.observations();
  std::vector<Matrix> scatter(static_cast<std::size_t>(L), Matrix::Zero(r, r));
  std::vector<int> counts(static_cast<std::size_t>(L), 0);
  for (int i = 0; i < data.size(); ++i) {
    if (S[i] != k) continue;
    const int l = I[i];
    const Vector d = y.row(i).transpose() - mus[l];
    scatter[l].noalias() += d * d.transpose();
    ++counts[l];
  }
  SubcomponentCovariances out;
  out.sigma.reserve(static_cast<std::size_t>(L));
  out.precision.reserve(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    Matrix q = sample_wishart(c0 + 0.5 * counts[l], C0k + 0.5 * scatter[l], rng);
    out.sigma.push_back(spd_inverse(q));
    out.precision.push_back(std::move(q));
  }
  return out;
}

std::vector<Vector> step_sample_mus(const DataSet& data, const Labels& S, const Labels& I, int k,
                                    const std::vector<Matrix>& precisions, const Vector& b0k,
                                    const Matrix& B0, const Vector& lambda_k, Rng& rng) {
  const int L = static_cast<int>(precisions.size());
  const int r = data.dim();
  const RowMatrix& y = data.observations();
  std::vector<Vector> sums(static_cast<std::size_t>(L), Vector::Zero(r));
  std::vector<int> counts(static_cast<std::size_t>(L), 0);
  for (int i = 0; i < data.size(); ++i) {
    if (S[i] != k) continue;
    sums[I[i]] += y.row(i).transpose();
    ++counts[I[i]];
  }
  const Matrix bt_inv = diag_inverse(B0, lambda_k);
  const Vector prior_term = bt_inv * b0k;
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    // N_kl * ybar_kl is the plain sum, zero for an empty subcomponent.
    const Matrix post_cov = spd_inverse(bt_inv + counts[l] * precisions[l]);
    const Vector post_mean = post_cov * (prior_term + precisions[l] * sums[l]);
    out.push_back(sample_mvn(post_mean, post_cov, rng));
  }
  return out;
}

Vector step_sample_lambda(const std::vector<Vector>& mus, const Vector& b0k, const Matrix& B0,
                          double nu, Variant variant, Rng& rng) {
  const Eigen::Index r = b0k.size();
  if (variant == Variant::FixedC0Lambda1) return Vector::Ones(r);
  const double L = static_cast<double>(mus.size());
  const double p = nu - L / 2.0;
  const double a = 2.0 * nu;
  Vector out(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    double b = 0.0;
    for (const Vector& mu : mus) b += (mu[j] - b0k[j]) * (mu[j] - b0k[j]);
    b /= B0(j, j);
    if (b < 10.0 * std::numeric_limits<double>::epsilon()) {
      if (!(p > 0.0)) {
        throw InvalidParams("shrinkage factor: degenerate GIG with b = 0 and p <= 0");
      }
      out[j] = sample_gamma(p, a / 2.0, rng);
    } else {
      out[j] = sample_gig(p, a, b, rng);
    }
  }
  return out;
}

Matrix step_sample_C0(const std::vector<Matrix>& precisions, const FixedHyperparameters& hyp,
                      Rng& rng) {
  if (hyp.variant == Variant::FixedC0Lambda1) return hyp.g0 * hyp.G0_inv;
  Matrix rate = hyp.G0;
  for (const Matrix& q : precisions) rate += q;
  const double shape = hyp.g0 + static_cast<double>(precisions.size()) * hyp.c0;
  return sample_wishart(shape, rate, rng);
}

Vector step_sample_b0(const std::vector<Vector>& mus, const Vector& lambda_k, const Matrix& B0,
                      const Vector& m0, const Matrix& M0, Rng& rng) {
  const Matrix bt_inv = diag_inverse(B0, lambda_k);
  const Matrix m0_inv = spd_inverse(M0);
  Vector mu_sum = Vector::Zero(m0.size());
  for (const Vector& mu : mus) mu_sum += mu;
  const Matrix post_cov = spd_inverse(m0_inv + static_cast<double>(mus.size()) * bt_inv);
  const Vector post_mean = post_cov * (m0_inv * m0 + bt_inv * mu_sum);
  return sample_mvn(post_mean, post_cov, rng);
}

namespace {

// Steps 2b (w, Sigma, mu) for every cluster.
void update_cluster_parameters(const DataSet& data, const FixedHyperparameters& hyp,
                               MixtureState& st, Rng& rng) {
  const int K = st.params.clusters_count();
  for (int k = 0; k < K; ++k) {
    ClusterParams& c = st.params.clusters[k];
    const ClusterHyper& h = st.hyper[k];
    c.w = step_sample_weights(st.I, st.S, k, c.subcomponents(), hyp.d0, rng);
    SubcomponentCovariances cov = step_sample_sigmas(data, st.S, st.I, k, c.mu, h.C0, hyp.c0, rng);
    c.sigma = std::move(cov.sigma);
    st.precision[k] = std::move(cov.precision);
    c.mu = step_sample_mus(data, st.S, st.I, k, st.precision[k], h.b0, hyp.B0, h.lambda, rng);
  }
}

// Steps 3 (lambda, C0, b0) for every cluster.
void update_cluster_hyperparameters(const FixedHyperparameters& hyp, MixtureState& st, Rng& rng) {
  const int K = st.params.clusters_count();
  for (int k = 0; k < K; ++k) {
    ClusterHyper& h = st.hyper[k];
    const ClusterParams& c = st.params.clusters[k];
    h.lambda = step_sample_lambda(c.mu, h.b0, hyp.B0, hyp.nu, hyp.variant, rng);
    h.C0 = step_sample_C0(st.precision[k], hyp, rng);
    h.b0 = step_sample_b0(c.mu, h.lambda, hyp.B0, hyp.m0, hyp.M0, rng);
  }
}

}  // namespace

MixtureState initial_state(const DataSet& data, const FixedHyperparameters& hyp, int K, int L,
                           Rng& rng) {
  const int r = data.dim();
  const RowMatrix& y = data.observations();
  Allocations alloc = init_allocations(data, K, L, rng);

  MixtureState st;
  st.S = std::move(alloc.S);
  st.I = std::move(alloc.I);
  st.params.eta = Vector::Constant(K, 1.0 / K);
  st.params.clusters.resize(static_cast<std::size_t>(K));
  st.precision.resize(static_cast<std::size_t>(K));
  st.hyper.resize(static_cast<std::size_t>(K));

  for (int k = 0; k < K; ++k) {
    Vector cluster_sum = Vector::Zero(r);
    int cluster_n = 0;
    std::vector<Vector> sums(static_cast<std::size_t>(L), Vector::Zero(r));
    std::vector<int> counts(static_cast<std::size_t>(L), 0);
    for (int i = 0; i < data.size(); ++i) {
      if (st.S[i] != k) continue;
      cluster_sum += y.row(i).transpose();
      ++cluster_n;
      sums[st.I[i]] += y.row(i).transpose();
      ++counts[st.I[i]];
    }
    ClusterHyper& h = st.hyper[k];
    h.C0 = hyp.g0 * hyp.G0_inv;
    h.lambda = Vector::Ones(r);
    h.b0 = cluster_n > 0 ? Vector(cluster_sum / cluster_n) : hyp.m0;

    ClusterParams& c = st.params.clusters[k];
    c.w = Vector::Constant(L, 1.0 / L);
    c.mu.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
      c.mu[l] = counts[l] > 0 ? Vector(sums[l] / counts[l]) : h.b0;
    }
  }

  st.params.eta = step_sample_eta(st.S, K, hyp.e0, rng);
  update_cluster_parameters(data, hyp, st, rng);
  update_cluster_hyperparameters(hyp, st, rng);
  return st;
}

void gibbs_sweep(const DataSet& data, const FixedHyperparameters& hyp, MixtureState& st,
                 Rng& rng) {
  const int K = st.params.clusters_count();
  st.params.eta = step_sample_eta(st.S, K, hyp.e0, rng);
  const DensityTable table(st.params);
  st.S = classify_clusters(data, table, rng);
  st.I = classify_subcomponents(data, st.S, table, rng);
  update_cluster_parameters(data, hyp, st, rng);
  update_cluster_hyperparameters(hyp, st, rng);
}

ChainOutput run_chain(const DataSet& data, const FixedHyperparameters& hyp,
                      const ChainConfig& cfg, const ProgressCallback& progress) {
  cfg.validate();
  hyp.validate();
  if (hyp.dim() != data.dim()) throw InvalidConfig("run_chain: data and hyperparameter dimensions differ");

  Rng rng(cfg.seed);
  ChainOutput out;
  out.config = cfg;
  out.draws.reserve(static_cast<std::size_t>(cfg.iterations / cfg.thin));

  MixtureState st;
  try {
    st = initial_state(data, hyp, cfg.K, cfg.L, rng);
  } catch (const SamplerFailure&) {
    throw;
  } catch (const Error& e) {
    throw SamplerFailure(0, e.what());
  }

  const long total = cfg.burnin + cfg.iterations;
  for (long t = 1; t <= total; ++t) {
    try {
      gibbs_sweep(data, hyp, st, rng);
    } catch (const Error& e) {
      throw SamplerFailure(t, e.what());
    }
    const long kept = t - cfg.burnin;
    if (kept > 0 && kept % cfg.thin == 0) {
      Draw d;
      d.iter = kept;
      d.params = st.params;
      d.b0.reserve(static_cast<std::size_t>(cfg.K));
      d.lambda.reserve(static_cast<std::size_t>(cfg.K));
      for (const ClusterHyper& h : st.hyper) {
        d.b0.push_back(h.b0);
        d.lambda.push_back(h.lambda);
      }
      d.S = st.S;
      d.K0 = count_nonempty(st.S, cfg.K);
      out.K0_trace.push_back(d.K0);
      out.draws.push_back(std::move(d));
    }
    if (progress && !progress(t, total)) break;
  }
  return out;
}

}  // namespace smm
