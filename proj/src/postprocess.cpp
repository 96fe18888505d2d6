#include "smm/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "smm/density_table.hpp"
#include "smm/errors.hpp"
#include "smm/kmeans.hpp"

namespace smm {

int estimate_K0(const std::vector<int>& K0_trace) {
  if (K0_trace.empty()) throw InvalidCount("estimate_K0: empty trace");
  std::map<int, long> counts;
  for (int k : K0_trace) ++counts[k];
  int best = counts.begin()->first;
  long best_n = 0;
  for (const auto& [k, n] : counts) {
    if (n > best_n) {
      best = k;
      best_n = n;
    }
  }
  return best;
}

namespace {

// Moves every cluster-indexed field of d so that old cluster k lands at
// position to[k]; entries with to[k] < 0 are dropped. Width becomes `width`.
Draw reindex(const Draw& d, const std::vector<int>& to, int width) {
  const int K = d.params.clusters_count();
  Draw out;
  out.iter = d.iter;
  out.params.eta = Vector::Zero(width);
  out.params.clusters.resize(static_cast<std::size_t>(width));
  out.b0.resize(static_cast<std::size_t>(width));
  out.lambda.resize(static_cast<std::size_t>(width));
  for (int k = 0; k < K; ++k) {
    const int j = to[k];
    if (j < 0) continue;
    out.params.eta[j] = d.params.eta[k];
    out.params.clusters[j] = d.params.clusters[k];
    if (!d.b0.empty()) out.b0[j] = d.b0[k];
    if (!d.lambda.empty()) out.lambda[j] = d.lambda[k];
  }
  if (d.b0.empty()) out.b0.clear();
  if (d.lambda.empty()) out.lambda.clear();
  out.S.resize(d.S.size());
  for (std::size_t i = 0; i < d.S.size(); ++i) {
    const int j = to[d.S[i]];
    if (j < 0) throw InvalidLabel("reindex: observation allocated to a dropped cluster");
    out.S[i] = j;
  }
  out.K0 = d.K0;
  return out;
}

}  // namespace

FilteredChain filter_draws(const ChainOutput& chain, int K0_hat) {
  if (K0_hat < 1) throw InvalidCount("filter_draws: K0_hat must be at least 1");
  FilteredChain out;
  out.K0_hat = K0_hat;
  for (std::size_t m = 0; m < chain.draws.size(); ++m) {
    const Draw& d = chain.draws[m];
    if (d.K0 != K0_hat) continue;
    const int K = d.params.clusters_count();
    std::vector<bool> used(static_cast<std::size_t>(K), false);
    for (int s : d.S) used[s] = true;
    std::vector<int> to(static_cast<std::size_t>(K), -1);
    int next = 0;
    for (int k = 0; k < K; ++k) {
      if (used[k]) to[k] = next++;
    }
    out.draws.push_back(reindex(d, to, K0_hat));
    out.source_index.push_back(static_cast<long>(m));
  }
  if (out.draws.empty()) {
    throw NoMatchingDraws("no stored draw has " + std::to_string(K0_hat) + " non-empty clusters");
  }
  return out;
}

RowMatrix cluster_means_functional(const Draw& draw) {
  const int K = draw.params.clusters_count();
  const auto r = draw.params.clusters.front().mu.front().size();
  RowMatrix out = RowMatrix::Zero(K, r);
  for (int k = 0; k < K; ++k) {
    const ClusterParams& c = draw.params.clusters[k];
    for (int l = 0; l < c.subcomponents(); ++l) out.row(k) += c.w[l] * c.mu[l].transpose();
  }
  return out;
}

namespace {

constexpr int kPointProcessRestarts = 10;
constexpr int kPointProcessMaxIter = 100;

std::vector<Labels> split_rows(const Labels& labels, int K0_hat) {
  const std::size_t M = labels.size() / static_cast<std::size_t>(K0_hat);
  std::vector<Labels> rhos(M);
  for (std::size_t m = 0; m < M; ++m) {
    rhos[m].assign(labels.begin() + static_cast<long>(m * K0_hat),
                   labels.begin() + static_cast<long>((m + 1) * K0_hat));
  }
  return rhos;
}

}  // namespace

std::vector<Labels> cluster_point_process(const RowMatrix& functionals, int K0_hat,
                                          RandomSeed seed, PointProcessMetric metric) {
  if (K0_hat < 1 || functionals.rows() == 0 || functionals.rows() % K0_hat != 0) {
    throw InvalidCount("cluster_point_process: rows must be a positive multiple of K0_hat");
  }
  if (K0_hat == 1) return split_rows(Labels(static_cast<std::size_t>(functionals.rows()), 0), 1);

  Rng rng(seed);
  KMeansResult km =
      kmeans(functionals, K0_hat, kPointProcessRestarts, kPointProcessMaxIter, rng);

  if (metric == PointProcessMetric::Mahalanobis) {
    const auto n = functionals.rows();
    const auto r = functionals.cols();
    Matrix pooled = Matrix::Zero(r, r);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector d = (functionals.row(i) - km.centers.row(km.labels[i])).transpose();
      pooled.noalias() += d * d.transpose();
    }
    const auto df = n - K0_hat;
    if (df > 0) {
      pooled /= static_cast<double>(df);
      Eigen::LLT<Matrix> llt(pooled);
      const Matrix lower = llt.matrixL();
      if (llt.info() == Eigen::Success && lower.diagonal().minCoeff() > 0.0) {
        // rows of X L^-T have identity pooled covariance
        const RowMatrix whitened = lower.triangularView<Eigen::Lower>()
                                       .solve(Matrix(functionals.transpose()))
                                       .transpose();
        km = kmeans(whitened, K0_hat, kPointProcessRestarts, kPointProcessMaxIter, rng);
      }
    }
  }
  return split_rows(km.labels, K0_hat);
}

bool is_permutation(const Labels& rho, int K0_hat) {
  if (static_cast<int>(rho.size()) != K0_hat) return false;
  std::vector<bool> seen(static_cast<std::size_t>(K0_hat), false);
  for (int c : rho) {
    if (c < 0 || c >= K0_hat || seen[c]) return false;
    seen[c] = true;
  }
  return true;
}

PermutationFilterResult permutation_filter(const std::vector<Labels>& rhos, int K0_hat) {
  PermutationFilterResult out;
  for (std::size_t m = 0; m < rhos.size(); ++m) {
    if (is_permutation(rhos[m], K0_hat)) out.kept.push_back(static_cast<int>(m));
  }
  out.M0_rho = rhos.empty() ? 0.0
                            : static_cast<double>(rhos.size() - out.kept.size()) /
                                  static_cast<double>(rhos.size());
  return out;
}

std::vector<Draw> relabel(const std::vector<Draw>& draws, const std::vector<Labels>& rhos) {
  if (draws.size() != rhos.size()) throw LengthMismatch("relabel: one rho per draw required");
  std::vector<Draw> out;
  out.reserve(draws.size());
  for (std::size_t m = 0; m < draws.size(); ++m) {
    const int K = draws[m].params.clusters_count();
    if (!is_permutation(rhos[m], K)) {
      throw NotAPermutation("relabel: rho of draw " + std::to_string(m + 1) +
                            " is not a permutation");
    }
    out.push_back(reindex(draws[m], rhos[m], K));
  }
  return out;
}

Classification posterior_classification(const DataSet& data, const std::vector<Draw>& draws) {
  if (draws.empty()) throw NoMatchingDraws("posterior_classification: no draws");
  const int n = data.size();
  const int K = draws.front().params.clusters_count();
  const RowMatrix& y = data.observations();
  Matrix t = Matrix::Zero(n, K);
  std::vector<double> terms(static_cast<std::size_t>(K));
  for (const Draw& d : draws) {
    if (d.params.clusters_count() != K) throw InvalidCount("posterior_classification: mixed widths");
    const DensityTable table(d.params);
    for (int i = 0; i < n; ++i) {
      table.weighted_cluster_log_terms(y.row(i).data(), terms.data());
      const double norm = log_sum_exp(terms.data(), K);
      if (!std::isfinite(norm)) {
        throw AllZeroLikelihood("posterior_classification: observation " +
                                std::to_string(i + 1) + " has zero density under every cluster");
      }
      for (int k = 0; k < K; ++k) t(i, k) += std::exp(terms[k] - norm);
    }
  }
  Classification out;
  out.S_hat.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    t.row(i) /= t.row(i).sum();
    int best = 0;
    for (int k = 1; k < K; ++k) {
      if (t(i, k) > t(i, best)) best = k;
    }
    out.S_hat[i] = best;
  }
  out.t = std::move(t);
  return out;
}

Labels most_frequent_labels(const std::vector<Draw>& draws, int K0_hat) {
  if (draws.empty()) throw NoMatchingDraws("most_frequent_labels: no draws");
  const std::size_t n = draws.front().S.size();
  std::vector<std::vector<int>> counts(n, std::vector<int>(static_cast<std::size_t>(K0_hat), 0));
  for (const Draw& d : draws) {
    for (std::size_t i = 0; i < n; ++i) ++counts[i][d.S[i]];
  }
  Labels out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<int>(std::max_element(counts[i].begin(), counts[i].end()) -
                              counts[i].begin());
  }
  return out;
}

Matrix similarity_matrix(const ChainOutput& chain) {
  if (chain.draws.empty()) throw NoMatchingDraws("similarity_matrix: no draws");
  const auto n = static_cast<Eigen::Index>(chain.draws.front().S.size());
  Matrix counts = Matrix::Zero(n, n);
  for (const Draw& d : chain.draws) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const int sj = d.S[j];
      for (Eigen::Index i = j + 1; i < n; ++i) {
        if (d.S[i] == sj) counts(i, j) += 1.0;
      }
    }
  }
  const double m = static_cast<double>(chain.draws.size());
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      out(i, j) = counts(i, j) / m;
      out(j, i) = out(i, j);
    }
  }
  return out;
}

double posterior_entropy(const Matrix& t) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index k = 0; k < t.cols(); ++k) {
      const double p = t(i, k);
      if (p > 0.0) h -= p * std::log(p);
    }
  }
  return std::max(h, 0.0);
}

namespace {

std::vector<ClusterSummary> summarize(const std::vector<Draw>& draws, int K) {
  std::vector<ClusterSummary> out(static_cast<std::size_t>(K));
  const auto r = draws.front().params.clusters.front().mu.front().size();
  for (auto& s : out) s.mu = Vector::Zero(r);
  for (const Draw& d : draws) {
    const RowMatrix f = cluster_means_functional(d);
    for (int k = 0; k < K; ++k) {
      out[k].eta += d.params.eta[k];
      out[k].mu += f.row(k).transpose();
    }
  }
  const double m = static_cast<double>(draws.size());
  for (auto& s : out) {
    s.eta /= m;
    s.mu /= m;
  }
  return out;
}

// Position of each class after sorting by decreasing weight.
std::vector<int> canonical_positions(const std::vector<ClusterSummary>& s) {
  std::vector<int> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (s[a].eta != s[b].eta) return s[a].eta > s[b].eta;
    return std::lexicographical_compare(s[a].mu.begin(), s[a].mu.end(), s[b].mu.begin(),
                                        s[b].mu.end());
  });
  std::vector<int> pos(s.size());
  for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = static_cast<int>(p);
  return pos;
}

}  // namespace

IdentifiedModel identify(const ChainOutput& chain, const DataSet& data, RandomSeed seed,
                         const IdentifyOptions& options) {
  if (chain.draws.empty()) throw NoMatchingDraws("identify: chain has no draws");
  IdentifiedModel out;
  std::vector<int> trace;
  trace.reserve(chain.draws.size());
  for (const Draw& d : chain.draws) trace.push_back(d.K0);
  out.K0_hat = estimate_K0(trace);
  const int K0 = out.K0_hat;

  const FilteredChain filtered = filter_draws(chain, K0);
  out.M0 = static_cast<int>(filtered.draws.size());

  const auto r = data.dim();
  RowMatrix stacked(static_cast<Eigen::Index>(out.M0) * K0, r);
  for (int m = 0; m < out.M0; ++m) {
    stacked.middleRows(static_cast<Eigen::Index>(m) * K0, K0) =
        cluster_means_functional(filtered.draws[m]);
  }
  const std::vector<Labels> rhos = cluster_point_process(stacked, K0, seed, options.metric);
  const PermutationFilterResult pf = permutation_filter(rhos, K0);
  out.M0_rho = pf.M0_rho;
  if (pf.kept.empty()) {
    throw NoMatchingDraws("identify: no classification sequence is a permutation");
  }

  std::vector<Draw> kept;
  std::vector<Labels> kept_rho;
  kept.reserve(pf.kept.size());
  kept_rho.reserve(pf.kept.size());
  for (int m : pf.kept) {
    kept.push_back(filtered.draws[m]);
    kept_rho.push_back(rhos[m]);
  }
  std::vector<Draw> relabeled = relabel(kept, kept_rho);

  const std::vector<int> pos = canonical_positions(summarize(relabeled, K0));
  for (Labels& rho : kept_rho) {
    for (int& c : rho) c = pos[c];
  }
  out.relabeled_draws = relabel(kept, kept_rho);
  out.clusters = summarize(out.relabeled_draws, K0);

  Classification cls = posterior_classification(data, out.relabeled_draws);
  out.t = std::move(cls.t);
  out.S_hat = options.rule == ClassificationRule::MostFrequent
                  ? most_frequent_labels(out.relabeled_draws, K0)
                  : std::move(cls.S_hat);
  out.entropy = posterior_entropy(out.t);
  if (out.M0_rho > options.overlap_warning) {
    out.warning = "clusters are overlapping: " + std::to_string(out.M0_rho) +
                  " of the classification sequences are not permutations";
  }
  return out;
}

}  // namespace smm
