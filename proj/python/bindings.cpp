#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smm/config.hpp"
#include "smm/datagen.hpp"
#include "smm/errors.hpp"
#include "smm/io.hpp"
#include "smm/metrics.hpp"
#include "smm/postprocess.hpp"

namespace py = pybind11;

namespace {

using namespace smm;

Labels from_python_labels(const std::vector<double>& raw) { return encode_labels(raw); }

std::vector<int> to_one_based(const Labels& l) {
  std::vector<int> out(l.begin(), l.end());
  for (int& v : out) ++v;
  return out;
}

DataSet to_dataset(const RowMatrix& x) { return DataSet::from_rows(x); }

ChainOutput fit(const RowMatrix& x, int K, int L, double phi_b, double phi_w, double e0, double nu,
                const std::string& variant, long burnin, long iterations, int thin,
                std::uint64_t seed) {
  RunConfig cfg;
  cfg.K = K;
  cfg.L = L;
  cfg.phi_b = phi_b;
  cfg.phi_w = phi_w;
  cfg.e0 = e0;
  cfg.nu = nu;
  cfg.variant = parse_variant(variant);
  cfg.burnin = burnin;
  cfg.iterations = iterations;
  cfg.thin = thin;
  cfg.seeds = {seed};
  cfg.validate();
  const DataSet data = to_dataset(x);
  const FixedHyperparameters hyp = hyperparameters(cfg, data);
  py::gil_scoped_release release;
  return run_chain(data, hyp, chain_config(cfg, seed));
}

py::dict identify_py(const ChainOutput& chain, const RowMatrix& x, std::uint64_t seed,
                     const std::string& metric, const std::string& rule) {
  IdentifyOptions opt;
  if (metric == "mahalanobis") opt.metric = PointProcessMetric::Mahalanobis;
  else if (metric != "euclidean") throw InvalidConfig("metric must be euclidean or mahalanobis");
  if (rule == "frequent") opt.rule = ClassificationRule::MostFrequent;
  else if (rule != "max") throw InvalidConfig("rule must be max or frequent");
  const DataSet data = to_dataset(x);
  IdentifiedModel m;
  {
    py::gil_scoped_release release;
    m = identify(chain, data, identify_seed(seed), opt);
  }
  std::vector<double> eta;
  std::vector<Vector> mu;
  for (const auto& c : m.clusters) {
    eta.push_back(c.eta);
    mu.push_back(c.mu);
  }
  py::dict d;
  d["K0_hat"] = m.K0_hat;
  d["M0"] = m.M0;
  d["M0_rho"] = m.M0_rho;
  d["entropy"] = m.entropy;
  d["S_hat"] = to_one_based(m.S_hat);
  d["t"] = m.t;
  d["cluster_eta"] = eta;
  d["cluster_mu"] = mu;
  d["warning"] = m.warning;
  return d;
}

py::tuple simulate(const std::string& generator, std::uint64_t seed, int n) {
  const RandomSeed s = data_seed(seed);
  SimulatedData sim = [&] {
    if (generator == "setup1") return setup_I(s);
    if (generator == "setup2") return setup_II(s);
    if (generator == "sal") return sample_sal_mixture(default_sal_spec(), n, s);
    throw InvalidConfig("generator must be setup1, setup2 or sal");
  }();
  return py::make_tuple(sim.data.observations(), to_one_based(sim.component),
                        to_one_based(sim.cluster));
}

}  // namespace

PYBIND11_MODULE(smm, m) {
  m.doc() = "Sparse hierarchical mixture-of-mixtures clustering";

  py::register_exception<smm::Error>(m, "Error", PyExc_RuntimeError);

  py::class_<ChainOutput>(m, "Chain")
      .def_property_readonly("K0_trace", [](const ChainOutput& c) { return c.K0_trace; })
      .def_property_readonly("K", [](const ChainOutput& c) { return c.config.K; })
      .def_property_readonly("L", [](const ChainOutput& c) { return c.config.L; })
      .def("__len__", [](const ChainOutput& c) { return c.draws.size(); })
      .def("eta", [](const ChainOutput& c, std::size_t m) { return Vector(c.draws.at(m).params.eta); },
           py::arg("draw"))
      .def("labels", [](const ChainOutput& c, std::size_t m) { return to_one_based(c.draws.at(m).S); },
           py::arg("draw"))
      .def("save", [](const ChainOutput& c, const std::string& path) { write_chain_file(path, c); },
           py::arg("path"))
      .def_static("load", &read_chain_file, py::arg("path"));

  m.def("fit", &fit, "Run one Gibbs chain on an N x r array", py::arg("data"), py::arg("K") = 10,
        py::arg("L") = 4, py::arg("phi_b") = 0.5, py::arg("phi_w") = 0.1, py::arg("e0") = 0.001,
        py::arg("nu") = 10.0, py::arg("variant") = "hier", py::arg("burnin") = 4000,
        py::arg("iterations") = 4000, py::arg("thin") = 1, py::arg("seed") = 1);

  m.def("identify", &identify_py, "Identify clusters from a chain", py::arg("chain"),
        py::arg("data"), py::arg("seed") = 1, py::arg("metric") = "euclidean",
        py::arg("rule") = "max");

  m.def("similarity_matrix", &similarity_matrix, py::arg("chain"));

  m.def("estimate_K0", &estimate_K0, py::arg("trace"));

  m.def("simulate", &simulate,
        "Generate (X, component, cluster) from setup1, setup2 or the default sal mixture",
        py::arg("generator"), py::arg("seed") = 1, py::arg("n") = 500);

  m.def(
      "adjusted_rand",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return adjusted_rand(from_python_labels(a), from_python_labels(b));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "misclassification_rate",
      [](const std::vector<double>& est, const std::vector<double>& truth) {
        return misclassification_rate(from_python_labels(est), from_python_labels(truth));
      },
      py::arg("est"), py::arg("truth"));

  m.def(
      "log_partition_prior",
      [](const std::vector<int>& labels, int K, double e0) {
        Labels z(labels.begin(), labels.end());
        for (int& v : z) --v;
        return log_partition_prior(z, K, e0);
      },
      py::arg("labels"), py::arg("K"), py::arg("e0"));
}
