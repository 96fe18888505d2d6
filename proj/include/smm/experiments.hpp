#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smm/config.hpp"
#include "smm/postprocess.hpp"

namespace smm {

/// Runs fn(0..n-1) on up to `threads` workers. Exceptions are rethrown on the
/// caller after all workers finish (the first by index wins).
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Worker count: SMM_THREADS if set, else hardware concurrency.
int default_threads();

struct SeedResult {
  std::uint64_t seed = 0;
  int K0_hat = 0;
  int K0_mode_trace = 0;
  double M0_rho = 0.0;
  std::optional<double> ari;
  std::optional<double> error_rate;
  std::string failure;  // non-empty when fit or identification failed
};

/// fit, identify, and (when truth is given) evaluate one chain.
SeedResult fit_and_evaluate(const DataSet& data, const Labels* truth, const RunConfig& cfg,
                            std::uint64_t seed, IdentifyOptions options = {});

struct ExperimentReport {
  std::string id;
  std::string cell;        // parameter description
  std::string notice;      // reason when skipped
  bool skipped = false;
  std::vector<SeedResult> runs;

  /// Frequency of each K0_hat over successful runs.
  std::map<int, int> K0_frequencies() const;
  int count_K0(int k) const;
};

/// Experiment ids: "simC1-cell" (setup I; K and L from cfg), "simC2-cell"
/// (setup II; phi_b and phi_w from cfg), "table1-row" (cfg.data with a
/// `cluster` truth column). Each seed generates its own dataset for the
/// simulation cells. A missing table1 dataset yields a skipped report.
ExperimentReport reproduce(const std::string& id, const RunConfig& cfg, int threads);

/// K0_hat with frequencies, mean ARI and error rate, one line per cell.
std::string format_report(const ExperimentReport& report);

}  // namespace smm
