#pragma once

#include <vector>

#include "smm/model.hpp"

namespace smm {

/// Counts n(g, h) = #{i : a_i = g, b_i = h}. Labels are zero-based; the
/// table has max(a) + 1 rows and max(b) + 1 columns.
Eigen::MatrixXi contingency(const Labels& a, const Labels& b);

/// Hubert–Arabie adjusted Rand index. Needs N >= 2.
double adjusted_rand(const Labels& a, const Labels& b);

/// Smallest fraction of misclassified points over injective matchings of
/// estimated to true labels (from the smaller side when the counts differ).
double misclassification_rate(const Labels& est, const Labels& truth);

/// Maximum-weight assignment on a square matrix; result[row] = column.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

}  // namespace smm
