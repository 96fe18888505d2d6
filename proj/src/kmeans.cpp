#include "smm/kmeans.hpp"

#include <limits>

#include "smm/errors.hpp"

namespace smm {
namespace {

RowMatrix seed_plus_plus(const RowMatrix& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  RowMatrix centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (x.row(i) - centers.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      // D^2 weighting; points already chosen have weight zero.
      double u = rng.uniform() * total;
      Eigen::Index last_positive = 0;
      pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        u -= d2[i];
        if (u <= 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = last_positive;
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

KMeansResult lloyd(const RowMatrix& x, RowMatrix centers, int max_iter) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(centers.rows());
  KMeansResult res;
  res.labels.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.labels[i] != best) {
        res.labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    RowMatrix sums = RowMatrix::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(res.labels[i]) += x.row(i);
      ++counts[res.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
    }
  }
  res.sse = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    res.sse += (x.row(i) - centers.row(res.labels[i])).squaredNorm();
  }
  res.centers = std::move(centers);
  return res;
}

}  // namespace

KMeansResult kmeans(const RowMatrix& points, int k, int restarts, int max_iter, Rng& rng) {
  if (k < 1 || k > points.rows()) throw InvalidCount("kmeans: need 1 <= k <= number of points");
  KMeansResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, restarts); ++run) {
    KMeansResult res = lloyd(points, seed_plus_plus(points, k, rng), max_iter);
    if (res.sse < best.sse) best = std::move(res);
  }
  return best;
}

}  // namespace smm
