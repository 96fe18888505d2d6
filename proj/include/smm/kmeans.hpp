#pragma once

#include "smm/model.hpp"
#include "smm/random.hpp"

namespace smm {

struct KMeansResult {
  Labels labels;      // zero-based group of each row
  RowMatrix centers;  // k x r
  double sse = 0.0;   // within-group sum of squares
};

/// Lloyd's algorithm from k-means++ seeds, repeated `restarts` times; the run
/// with the smallest within-group SSE wins. Requires 1 <= k <= rows.
/// A group that loses all its points keeps its previous center.
KMeansResult kmeans(const RowMatrix& points, int k, int restarts, int max_iter, Rng& rng);

}  // namespace smm
