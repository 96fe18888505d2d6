#pragma once

#include <string>
#include <vector>

#include "smm/sampler.hpp"

namespace smm {

/// Mode of the K0 trace; ties go to the smaller value.
int estimate_K0(const std::vector<int>& K0_trace);

/// Draws with exactly K0_hat non-empty clusters, each reduced to width K0_hat:
/// non-empty clusters first in their original order, labels in S remapped.
struct FilteredChain {
  int K0_hat = 0;
  std::vector<Draw> draws;
  std::vector<long> source_index;  // position of each draw in the input chain
};

/// Throws NoMatchingDraws when no draw has K0 == K0_hat.
FilteredChain filter_draws(const ChainOutput& chain, int K0_hat);

/// Row k is sum_l w_kl mu_kl.
RowMatrix cluster_means_functional(const Draw& draw);

enum class PointProcessMetric {
  Euclidean,
  /// Points whitened by the pooled within-class covariance of a first
  /// Euclidean pass, then clustered again.
  Mahalanobis,
};

/// Clusters the stacked (M0 * K0_hat) x r functionals into K0_hat classes with
/// 10 K-means restarts. Element m of the result is rho^(m): the zero-based
/// class of each cluster in draw m.
std::vector<Labels> cluster_point_process(const RowMatrix& functionals, int K0_hat,
                                          RandomSeed seed,
                                          PointProcessMetric metric = PointProcessMetric::Euclidean);

bool is_permutation(const Labels& rho, int K0_hat);

struct PermutationFilterResult {
  std::vector<int> kept;  // indices into rhos
  double M0_rho = 0.0;    // dropped fraction
};

PermutationFilterResult permutation_filter(const std::vector<Labels>& rhos, int K0_hat);

/// Cluster k of draw m becomes class rhos[m][k]; eta, theta, b0, lambda move
/// with it and S_i becomes rhos[m][S_i]. Throws NotAPermutation.
std::vector<Draw> relabel(const std::vector<Draw>& draws, const std::vector<Labels>& rhos);

struct Classification {
  Matrix t;      // N x K0_hat, rows sum to one
  Labels S_hat;  // argmax of each row, ties to the smaller index
};

/// Averages eta_k p_k(y_i) / sum_j eta_j p_j(y_i) over the draws.
/// Throws AllZeroLikelihood if every cluster underflows for some point in some draw.
Classification posterior_classification(const DataSet& data, const std::vector<Draw>& draws);

/// Label visited most often by each observation across the draws.
Labels most_frequent_labels(const std::vector<Draw>& draws, int K0_hat);

/// Fraction of stored draws in which observations i and j share a cluster.
Matrix similarity_matrix(const ChainOutput& chain);

/// -sum t log t with 0 log 0 = 0.
double posterior_entropy(const Matrix& t);

struct ClusterSummary {
  double eta = 0.0;  // posterior mean weight
  Vector mu;         // posterior mean of sum_l w_kl mu_kl
};

enum class ClassificationRule { MaxProbability, MostFrequent };

struct IdentifyOptions {
  PointProcessMetric metric = PointProcessMetric::Euclidean;
  ClassificationRule rule = ClassificationRule::MaxProbability;
  double overlap_warning = 0.1;
};

struct IdentifiedModel {
  int K0_hat = 0;
  int M0 = 0;
  double M0_rho = 0.0;
  std::vector<Draw> relabeled_draws;
  Matrix t;
  Labels S_hat;
  double entropy = 0.0;
  std::vector<ClusterSummary> clusters;
  std::string warning;  // empty unless M0_rho exceeds the overlap threshold
};

/// Full pipeline. Classes come out ordered by decreasing posterior mean
/// weight, ties by the lexicographic order of the mean functional.
IdentifiedModel identify(const ChainOutput& chain, const DataSet& data, RandomSeed seed,
                         const IdentifyOptions& options = {});

}  // namespace smm
