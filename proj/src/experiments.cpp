#include "smm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <sstream>
#include <thread>

#include "smm/datagen.hpp"
#include "smm/errors.hpp"
#include "smm/io.hpp"
#include "smm/metrics.hpp"

namespace smm {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int default_threads() {
  if (const char* env = std::getenv("SMM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SeedResult fit_and_evaluate(const DataSet& data, const Labels* truth, const RunConfig& cfg,
                            std::uint64_t seed, IdentifyOptions options) {
  SeedResult res;
  res.seed = seed;
  try {
    const ChainOutput chain = run_chain(data, hyperparameters(cfg, data), chain_config(cfg, seed));
    res.K0_mode_trace = estimate_K0(chain.K0_trace);
    const IdentifiedModel model = identify(chain, data, identify_seed(seed), options);
    res.K0_hat = model.K0_hat;
    res.M0_rho = model.M0_rho;
    if (truth) {
      res.ari = adjusted_rand(model.S_hat, *truth);
      res.error_rate = misclassification_rate(model.S_hat, *truth);
    }
  } catch (const NoMatchingDraws& e) {
    // K0 is still known from the trace; only the partition is missing.
    res.K0_hat = res.K0_mode_trace;
    res.failure = e.what();
  } catch (const SamplerFailure& e) {
    res.failure = e.what();
  }
  return res;
}

std::map<int, int> ExperimentReport::K0_frequencies() const {
  std::map<int, int> f;
  for (const auto& r : runs) {
    if (r.K0_hat > 0) ++f[r.K0_hat];
  }
  return f;
}

int ExperimentReport::count_K0(int k) const {
  const auto f = K0_frequencies();
  const auto it = f.find(k);
  return it == f.end() ? 0 : it->second;
}

namespace {

std::string real(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

ExperimentReport reproduce(const std::string& id, const RunConfig& cfg, int threads) {
  cfg.validate();
  ExperimentReport rep;
  rep.id = id;
  const int n = static_cast<int>(cfg.seeds.size());
  rep.runs.resize(static_cast<std::size_t>(n));

  if (id == "simC1-cell" || id == "simC2-cell") {
    const bool one = id == "simC1-cell";
    rep.cell = one ? "setup I, K=" + std::to_string(cfg.K) + ", L=" + std::to_string(cfg.L)
                   : "setup II, phi_B=" + real(cfg.phi_b, 2) + ", phi_W=" + real(cfg.phi_w, 2);
    parallel_for(n, threads, [&](int i) {
      const std::uint64_t seed = cfg.seeds[i];
      const SimulatedData sim = one ? setup_I(data_seed(seed)) : setup_II(data_seed(seed));
      rep.runs[i] = fit_and_evaluate(sim.data, &sim.cluster, cfg, seed);
    });
    return rep;
  }

  if (id == "table1-row") {
    rep.cell = cfg.data.empty() ? "(no dataset)" : std::filesystem::path(cfg.data).stem().string();
    if (cfg.data.empty() || !std::filesystem::exists(cfg.data)) {
      rep.skipped = true;
      rep.notice = "dataset '" + cfg.data + "' not found; row skipped";
      rep.runs.clear();
      return rep;
    }
    LabeledData ld = read_data_csv(cfg.data);
    const DataSet data = DataSet::from_rows(std::move(ld.features));
    const Labels* truth = ld.cluster ? &*ld.cluster : nullptr;
    parallel_for(n, threads, [&](int i) {
      rep.runs[i] = fit_and_evaluate(data, truth, cfg, cfg.seeds[i]);
    });
    return rep;
  }

  throw InvalidConfig("unknown experiment '" + id +
                      "' (expected simC1-cell, simC2-cell or table1-row)");
}

std::string format_report(const ExperimentReport& rep) {
  std::ostringstream out;
  out << rep.id << " | " << rep.cell << "\n";
  if (rep.skipped) {
    out << "  skipped: " << rep.notice << "\n";
    return out.str();
  }
  out << "  seed  K0_hat  M0_rho  ARI     error\n";
  double ari_sum = 0.0, err_sum = 0.0;
  int scored = 0;
  for (const auto& r : rep.runs) {
    out << "  " << r.seed << "     " << r.K0_hat << "       " << real(r.M0_rho, 2) << "    "
        << (r.ari ? real(*r.ari) : "-") << "   " << (r.error_rate ? real(*r.error_rate) : "-");
    if (!r.failure.empty()) out << "   (" << r.failure << ")";
    out << "\n";
    if (r.ari && r.error_rate) {
      ari_sum += *r.ari;
      err_sum += *r.error_rate;
      ++scored;
    }
  }
  // Dominant value first, the rest in decreasing frequency.
  const auto counts = rep.K0_frequencies();
  std::vector<std::pair<int, int>> freq(counts.begin(), counts.end());
  std::stable_sort(freq.begin(), freq.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  out << "  K0_hat: ";
  for (std::size_t i = 0; i < freq.size(); ++i) {
    out << (i ? " / " : "") << freq[i].first << "(" << freq[i].second << ")";
  }
  if (scored > 0) {
    out << "   ARI " << real(ari_sum / scored, 2) << "   error " << real(err_sum / scored, 2);
  }
  out << "\n";
  return out.str();
}

}  // namespace smm
