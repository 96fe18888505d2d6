#include "smm/cli.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>

#include <CLI11.hpp>
#include <json.hpp>

#include "smm/config.hpp"
#include "smm/datagen.hpp"
#include "smm/errors.hpp"
#include "smm/experiments.hpp"
#include "smm/io.hpp"
#include "smm/metrics.hpp"

namespace smm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Command-line values for the RunConfig keys; a flag overrides the config file
// only when it was given.
struct RunFlags {
  std::string config;
  RunConfig v;
  std::string variant = "hier";
  int threads = 0;
  std::map<std::string, CLI::Option*> opt;

  void add(CLI::App* app, bool with_data = true) {
    app->add_option("--config", config, "key = value configuration file");
    if (with_data) opt["data"] = app->add_option("--data", v.data, "data CSV");
    opt["K"] = app->add_option("--K", v.K, "number of clusters");
    opt["L"] = app->add_option("--L", v.L, "subcomponents per cluster");
    opt["phi_b"] = app->add_option("--phi-b", v.phi_b, "between-cluster variance share");
    opt["phi_w"] = app->add_option("--phi-w", v.phi_w, "between-subcomponent variance share");
    opt["e0"] = app->add_option("--e0", v.e0, "Dirichlet concentration of the cluster weights");
    opt["nu"] = app->add_option("--nu", v.nu, "shrinkage hyperprior parameter");
    opt["variant"] = app->add_option("--variant", variant, "hier or fixed")
                         ->check(CLI::IsMember({"hier", "fixed"}));
    opt["burnin"] = app->add_option("--burnin", v.burnin, "burn-in sweeps");
    opt["iterations"] = app->add_option("--iters", v.iterations, "stored sweeps");
    opt["thin"] = app->add_option("--thin", v.thin, "thinning interval");
    opt["seeds"] = app->add_option("--seed", v.seeds, "random seed (repeatable)");
    opt["out"] = app->add_option("--out", v.out, "output location");
    app->add_option("--threads", threads, "worker threads (default SMM_THREADS or all cores)");
  }

  bool given(const std::string& key) const {
    const auto it = opt.find(key);
    return it != opt.end() && it->second->count() > 0;
  }

  RunConfig resolve(RunConfig defaults = {}) const {
    RunConfig cfg = config.empty() ? defaults : load_config(config, defaults);
    if (given("data")) cfg.data = v.data;
    if (given("K")) cfg.K = v.K;
    if (given("L")) cfg.L = v.L;
    if (given("phi_b")) cfg.phi_b = v.phi_b;
    if (given("phi_w")) cfg.phi_w = v.phi_w;
    if (given("e0")) cfg.e0 = v.e0;
    if (given("nu")) cfg.nu = v.nu;
    if (given("variant")) cfg.variant = parse_variant(variant);
    if (given("burnin")) cfg.burnin = v.burnin;
    if (given("iterations")) cfg.iterations = v.iterations;
    if (given("thin")) cfg.thin = v.thin;
    if (given("seeds")) cfg.seeds = v.seeds;
    if (given("out")) cfg.out = v.out;
    cfg.validate();
    return cfg;
  }

  int worker_count() const { return threads > 0 ? threads : default_threads(); }
};

json config_json(const RunConfig& cfg) {
  return json{{"data", cfg.data},
              {"K", cfg.K},
              {"L", cfg.L},
              {"phi_b", cfg.phi_b},
              {"phi_w", cfg.phi_w},
              {"e0", cfg.e0},
              {"nu", cfg.nu},
              {"variant", variant_name(cfg.variant)},
              {"burnin", cfg.burnin},
              {"iterations", cfg.iterations},
              {"thin", cfg.thin},
              {"seeds", cfg.seeds}};
}

DataSet load_dataset(const std::string& path) {
  if (path.empty()) throw InvalidConfig("no data file given (--data)");
  if (!fs::exists(path)) throw FormatError("data file not found: " + path);
  return DataSet::from_rows(read_data_csv(path).features);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create directory " + dir + ": " + ec.message());
}

std::string chain_file_name(std::uint64_t seed) { return "chain_seed" + std::to_string(seed) + ".ndjson"; }

int cmd_fit(const RunFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const DataSet data = load_dataset(cfg.data);
  const FixedHyperparameters hyp = hyperparameters(cfg, data);
  ensure_dir(cfg.out);

  const int n = static_cast<int>(cfg.seeds.size());
  std::vector<std::map<int, long>> hist(static_cast<std::size_t>(n));
  std::mutex log_mutex;
  parallel_for(n, flags.worker_count(), [&](int i) {
    const std::uint64_t seed = cfg.seeds[i];
    const ChainOutput chain = run_chain(data, hyp, chain_config(cfg, seed));
    write_chain_file((fs::path(cfg.out) / chain_file_name(seed)).string(), chain);
    for (int k : chain.K0_trace) ++hist[i][k];
    std::lock_guard lock(log_mutex);
    std::cerr << "seed " << seed << ": K0 mode " << estimate_K0(chain.K0_trace) << "\n";
  });

  json seeds = json::array();
  for (int i = 0; i < n; ++i) {
    json h = json::object();
    std::vector<int> trace;
    for (const auto& [k, c] : hist[i]) {
      h[std::to_string(k)] = c;
      trace.insert(trace.end(), static_cast<std::size_t>(c), k);
    }
    seeds.push_back({{"seed", cfg.seeds[i]},
                     {"file", chain_file_name(cfg.seeds[i])},
                     {"K0_histogram", h},
                     {"K0_mode", estimate_K0(trace)}});
  }
  json manifest{{"config", config_json(cfg)},
                {"data_hash", hex64(data_hash(data.observations()))},
                {"N", data.size()},
                {"r", data.dim()},
                {"chains", seeds}};
  write_text_file((fs::path(cfg.out) / "manifest.json").string(), manifest.dump(2) + "\n");
  return 0;
}

struct IdentifyFlags {
  std::vector<std::string> chains;
  std::string data;
  std::string out = ".";
  bool similarity = false;
  std::uint64_t seed = 1;
  std::string metric = "euclidean";
  std::string rule = "max";
  int threads = 0;
};

int cmd_identify(const IdentifyFlags& f) {
  const DataSet data = load_dataset(f.data);
  ensure_dir(f.out);
  IdentifyOptions options;
  options.metric = f.metric == "mahalanobis" ? PointProcessMetric::Mahalanobis
                                             : PointProcessMetric::Euclidean;
  options.rule = f.rule == "frequent" ? ClassificationRule::MostFrequent
                                      : ClassificationRule::MaxProbability;
  const int n = static_cast<int>(f.chains.size());
  std::mutex log_mutex;
  parallel_for(n, f.threads > 0 ? f.threads : default_threads(), [&](int i) {
    const ChainOutput chain = read_chain_file(f.chains[i]);
    const Draw& first = chain.draws.front();
    if (static_cast<int>(first.S.size()) != data.size() ||
        first.params.clusters.front().mu.front().size() != data.dim()) {
      throw FormatError(f.chains[i] + ": chain dimensions do not match the data");
    }
    const IdentifiedModel model = identify(chain, data, identify_seed(f.seed), options);
    const std::string stem = fs::path(f.chains[i]).stem().string();
    const fs::path out(f.out);
    write_identified_model((out / (stem + ".identified.json")).string(), model);
    write_labels_csv((out / (stem + ".labels.csv")).string(), model);
    if (f.similarity) {
      write_similarity_csv((out / (stem + ".similarity.csv")).string(), similarity_matrix(chain));
    }
    std::lock_guard lock(log_mutex);
    std::cerr << stem << ": K0_hat " << model.K0_hat << ", M0 " << model.M0 << ", M0_rho "
              << model.M0_rho << "\n";
    if (!model.warning.empty()) std::cerr << stem << ": warning: " << model.warning << "\n";
  });
  return 0;
}

struct SimulateFlags {
  std::string generator;
  std::uint64_t seed = 1;
  int n = 500;
  std::string out = "data.csv";
};

int cmd_simulate(const SimulateFlags& f) {
  SimulatedData sim = [&] {
    const RandomSeed seed = data_seed(f.seed);
    if (f.generator == "setup1") return setup_I(seed);
    if (f.generator == "setup2") return setup_II(seed);
    if (f.generator.rfind("gaussian:", 0) == 0) {
      return sample_gaussian_mixture(parse_generator_spec(read_text_file(f.generator.substr(9))),
                                     f.n, seed);
    }
    if (f.generator.rfind("sal:", 0) == 0) {
      const std::string path = f.generator.substr(4);
      const GeneratorSpec spec =
          path.empty() ? default_sal_spec() : parse_generator_spec(read_text_file(path));
      return sample_sal_mixture(spec, f.n, seed);
    }
    throw InvalidConfig("unknown generator '" + f.generator +
                        "' (expected setup1, setup2, gaussian:<spec>, sal:<spec>)");
  }();
  write_data_csv(f.out, sim.data.observations(), &sim.component, &sim.cluster);
  return 0;
}

struct EvaluateFlags {
  std::string labels;
  std::string truth;
  std::string out;
};

int cmd_evaluate(const EvaluateFlags& f) {
  const Labels est = read_label_column(f.labels);
  const Labels truth = read_label_column(f.truth);
  if (est.size() != truth.size()) {
    throw LengthMismatch("label files differ in length: " + std::to_string(est.size()) + " vs " +
                         std::to_string(truth.size()));
  }
  auto distinct = [](const Labels& l) { return *std::max_element(l.begin(), l.end()) + 1; };
  const json j{{"ari", adjusted_rand(est, truth)},
               {"error_rate", misclassification_rate(est, truth)},
               {"K_est", distinct(est)},
               {"K_true", distinct(truth)}};
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!f.out.empty()) write_text_file(f.out, text);
  return 0;
}

int cmd_reproduce(const std::string& id, const RunFlags& flags) {
  RunConfig defaults;
  std::uint64_t count = id == "table1-row" ? 5 : 10;
  defaults.seeds.resize(count);
  std::iota(defaults.seeds.begin(), defaults.seeds.end(), std::uint64_t{1});
  defaults.out.clear();
  const RunConfig cfg = flags.resolve(defaults);
  const ExperimentReport rep = reproduce(id, cfg, flags.worker_count());
  const std::string text = format_report(rep);
  std::cout << text;
  if (!cfg.out.empty()) write_text_file(cfg.out, text);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Sparse hierarchical mixture-of-mixtures clustering"};
  app.require_subcommand(1);

  RunFlags fit_flags;
  CLI::App* fit = app.add_subcommand("fit", "run one Gibbs chain per seed");
  fit_flags.add(fit);

  IdentifyFlags id_flags;
  CLI::App* ident = app.add_subcommand("identify", "identify clusters from chain files");
  ident->add_option("chains", id_flags.chains, "chain NDJSON files")->required();
  ident->add_option("--data", id_flags.data, "data CSV")->required();
  ident->add_option("--out", id_flags.out, "output directory");
  ident->add_flag("--similarity", id_flags.similarity, "write the co-clustering matrix");
  ident->add_option("--seed", id_flags.seed, "seed of the point-process K-means");
  ident->add_option("--metric", id_flags.metric, "euclidean or mahalanobis")
      ->check(CLI::IsMember({"euclidean", "mahalanobis"}));
  ident->add_option("--rule", id_flags.rule, "max (averaged probabilities) or frequent")
      ->check(CLI::IsMember({"max", "frequent"}));
  ident->add_option("--threads", id_flags.threads, "worker threads");

  SimulateFlags sim_flags;
  CLI::App* sim = app.add_subcommand("simulate", "generate a labeled dataset");
  sim->add_option("generator", sim_flags.generator,
                  "setup1, setup2, gaussian:<spec.json> or sal:<spec.json>")
      ->required();
  sim->add_option("--seed", sim_flags.seed, "random seed");
  sim->add_option("--n", sim_flags.n, "sample size for spec-file generators");
  sim->add_option("--out", sim_flags.out, "output CSV");

  EvaluateFlags ev_flags;
  CLI::App* ev = app.add_subcommand("evaluate", "compare a labeling with the truth");
  ev->add_option("labels", ev_flags.labels, "estimated labels CSV")->required();
  ev->add_option("truth", ev_flags.truth, "truth CSV")->required();
  ev->add_option("--out", ev_flags.out, "also write the metrics JSON here");

  RunFlags rep_flags;
  std::string experiment;
  CLI::App* rep = app.add_subcommand("reproduce", "rerun a table cell over a seed set");
  rep->add_option("experiment", experiment, "simC1-cell, simC2-cell or table1-row")
      ->required()
      ->check(CLI::IsMember({"simC1-cell", "simC2-cell", "table1-row"}));
  rep_flags.add(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_flags);
    if (ident->parsed()) return cmd_identify(id_flags);
    if (sim->parsed()) return cmd_simulate(sim_flags);
    if (ev->parsed()) return cmd_evaluate(ev_flags);
    if (rep->parsed()) return cmd_reproduce(experiment, rep_flags);
  } catch (const SamplerFailure& e) {
    std::cerr << "smm: sampler failure at " << e.what() << "\n";
    return 2;
  } catch (const NoMatchingDraws& e) {
    std::cerr << "smm: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "smm: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace smm
