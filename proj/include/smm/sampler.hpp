#pragma once

#include <functional>
#include <vector>

#include "smm/model.hpp"
#include "smm/random.hpp"

namespace smm {

/// Random hyperparameters of one cluster.
struct ClusterHyper {
  Matrix C0;      // Wishart rate of the subcomponent precisions
  Vector b0;      // cluster center
  Vector lambda;  // per-dimension shrinkage factors
};

/// Full state of the Gibbs sampler.
struct MixtureState {
  MixtureParams params;
  std::vector<std::vector<Matrix>> precision;  // Sigma_kl^-1, kept in step with params
  std::vector<ClusterHyper> hyper;
  Labels S;  // cluster of each observation
  Labels I;  // subcomponent of each observation within its cluster
};

struct ChainConfig {
  int K = 10;
  int L = 4;
  long burnin = 4000;
  long iterations = 4000;
  int thin = 1;
  RandomSeed seed{};

  void validate() const;
};

/// One stored sweep.
struct Draw {
  long iter = 0;  // one-based sweep index after burn-in
  MixtureParams params;
  std::vector<Vector> b0;
  std::vector<Vector> lambda;
  Labels S;
  int K0 = 0;
};

struct ChainOutput {
  ChainConfig config;
  std::vector<Draw> draws;
  std::vector<int> K0_trace;  // K0_trace[m] == draws[m].K0
};

struct Allocations {
  Labels S;
  Labels I;
};

/// K-means (100 iterations, 5 restarts) into K clusters, then K-means into L
/// subcomponents within each cluster. Clusters with fewer than L points get
/// subcomponents round-robin.
Allocations init_allocations(const DataSet& data, int K, int L, Rng& rng);

/// eta | S ~ Dir(e0 + N_1, ..., e0 + N_K).
Vector step_sample_eta(const Labels& S, int K, double e0, Rng& rng);

/// S_i | y_i ~ eta_k p_k(y_i), subcomponent allocations integrated out.
/// Throws AllZeroLikelihood if all K terms underflow for some observation.
Labels step_classify_clusters(const DataSet& data, const MixtureParams& params, Rng& rng);

/// I_i | S_i = k ~ w_kl N(y_i | mu_kl, Sigma_kl).
Labels step_classify_subcomponents(const DataSet& data, const Labels& S,
                                   const MixtureParams& params, Rng& rng);

/// w_k | I, S ~ Dir(d0 + N_k1, ..., d0 + N_kL).
Vector step_sample_weights(const Labels& I, const Labels& S, int k, int L, double d0, Rng& rng);

struct SubcomponentCovariances {
  std::vector<Matrix> sigma;
  std::vector<Matrix> precision;
};

/// Sigma_kl^-1 ~ W(c0 + N_kl / 2, C0k + 1/2 sum (y - mu_kl)(y - mu_kl)^T).
SubcomponentCovariances step_sample_sigmas(const DataSet& data, const Labels& S, const Labels& I,
                                           int k, const std::vector<Vector>& mus,
                                           const Matrix& C0k, double c0, Rng& rng);

/// mu_kl ~ N(b_kl, B_kl), B_kl = (Bt^-1 + N_kl Sigma_kl^-1)^-1,
/// b_kl = B_kl (Bt^-1 b0k + Sigma_kl^-1 N_kl ybar_kl), Bt = diag(lambda_k) B0.
std::vector<Vector> step_sample_mus(const DataSet& data, const Labels& S, const Labels& I, int k,
                                    const std::vector<Matrix>& precisions, const Vector& b0k,
                                    const Matrix& B0, const Vector& lambda_k, Rng& rng);

/// lambda_kj ~ GIG(nu - L/2, 2 nu, sum_l (mu_kl,j - b0k,j)^2 / B0_jj). When the
/// last argument is zero (all means at the center) the Gamma(p, nu) limit is
/// used; that limit needs p > 0. Returns ones under FixedC0Lambda1.
Vector step_sample_lambda(const std::vector<Vector>& mus, const Vector& b0k, const Matrix& B0,
                          double nu, Variant variant, Rng& rng);

/// C0k ~ W(g0 + L c0, G0 + sum_l Sigma_kl^-1); g0 * G0^-1 under FixedC0Lambda1.
Matrix step_sample_C0(const std::vector<Matrix>& precisions, const FixedHyperparameters& hyp,
                      Rng& rng);

/// b0k ~ N(m_k, M_k), M_k = (M0^-1 + L Bt^-1)^-1, m_k = M_k (M0^-1 m0 + Bt^-1 sum_l mu_kl).
Vector step_sample_b0(const std::vector<Vector>& mus, const Vector& lambda_k, const Matrix& B0,
                      const Vector& m0, const Matrix& M0, Rng& rng);

/// Initial state: allocations from init_allocations, hyperparameters at
/// their prior means, then one parameter update given the allocations.
MixtureState initial_state(const DataSet& data, const FixedHyperparameters& hyp, int K, int L,
                           Rng& rng);

/// One full sweep in the fixed order: eta, S, I, then per cluster w, Sigma,
/// mu, then per cluster lambda, C0, b0.
void gibbs_sweep(const DataSet& data, const FixedHyperparameters& hyp, MixtureState& state,
                 Rng& rng);

/// Number of distinct clusters used in S (labels must lie in [0, K)).
int count_nonempty(const Labels& S, int K);

/// Called after every sweep with (sweep index, total sweeps); return false to abort.
using ProgressCallback = std::function<bool(long, long)>;

/// Runs burn-in + iterations sweeps and stores every thin-th post-burn-in
/// sweep. Deterministic given cfg.seed. Step failures are rethrown as
/// SamplerFailure carrying the sweep index.
ChainOutput run_chain(const DataSet& data, const FixedHyperparameters& hyp,
                      const ChainConfig& cfg, const ProgressCallback& progress = {});

}  // namespace smm
