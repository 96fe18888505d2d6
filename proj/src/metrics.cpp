#include "smm/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "smm/errors.hpp"

namespace smm {

namespace {

void check_labels(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw LengthMismatch("label vectors differ in length");
  if (a.empty()) throw InvalidCount("label vectors are empty");
  for (int v : a) {
    if (v < 0) throw InvalidLabel("negative label");
  }
  for (int v : b) {
    if (v < 0) throw InvalidLabel("negative label");
  }
}

double choose2(double n) { return 0.5 * n * (n - 1.0); }

constexpr int kExhaustiveLimit = 8;

std::vector<int> exhaustive_assignment(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_val = -std::numeric_limits<double>::infinity();
  do {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += w(i, perm[i]);
    if (v > best_val) {
      best_val = v;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Hungarian method with potentials, minimizing cost; O(n^3).
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
  return out;
}

}  // namespace

Eigen::MatrixXi contingency(const Labels& a, const Labels& b) {
  check_labels(a, b);
  const int ga = *std::max_element(a.begin(), a.end()) + 1;
  const int gb = *std::max_element(b.begin(), b.end()) + 1;
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(ga, gb);
  for (std::size_t i = 0; i < a.size(); ++i) ++table(a[i], b[i]);
  return table;
}

double adjusted_rand(const Labels& a, const Labels& b) {
  const Eigen::MatrixXi table = contingency(a, b);
  const double n = static_cast<double>(a.size());
  if (n < 2) throw InvalidCount("adjusted_rand: need at least two observations");
  double sum_cells = 0.0;
  for (Eigen::Index i = 0; i < table.size(); ++i) sum_cells += choose2(table.data()[i]);
  double sum_rows = 0.0;
  for (Eigen::Index g = 0; g < table.rows(); ++g) sum_rows += choose2(table.row(g).sum());
  double sum_cols = 0.0;
  for (Eigen::Index h = 0; h < table.cols(); ++h) sum_cols += choose2(table.col(h).sum());
  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / (max_index - expected);
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights) {
  if (weights.rows() != weights.cols()) throw InvalidCount("assignment: matrix must be square");
  if (weights.rows() == 0) return {};
  if (weights.rows() <= kExhaustiveLimit) return exhaustive_assignment(weights);
  return hungarian(-weights);
}

double misclassification_rate(const Labels& est, const Labels& truth) {
  const Eigen::MatrixXi table = contingency(est, truth);
  const auto g = std::max(table.rows(), table.cols());
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(g, g);
  padded.topLeftCorner(table.rows(), table.cols()) = table.cast<double>();
  const std::vector<int> match = max_weight_assignment(padded);
  double matched = 0.0;
  for (Eigen::Index i = 0; i < g; ++i) matched += padded(i, match[i]);
  return 1.0 - matched / static_cast<double>(est.size());
}

}  // namespace smm
