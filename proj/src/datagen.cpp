#include "smm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "smm/errors.hpp"

namespace smm {

int GeneratorSpec::dim() const {
  return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
}

int GeneratorSpec::clusters() const {
  int g = 0;
  for (const auto& c : components) g = std::max(g, c.cluster + 1);
  return g;
}

bool GeneratorSpec::skewed() const {
  return std::any_of(components.begin(), components.end(),
                     [](const GeneratorComponent& c) { return c.skew.size() > 0; });
}

void GeneratorSpec::validate() const {
  if (components.empty()) throw InvalidParams("generator: no components");
  const int r = dim();
  if (r < 1) throw InvalidParams("generator: empty mean vector");
  double total = 0.0;
  std::vector<bool> seen(static_cast<std::size_t>(clusters()), false);
  for (const auto& c : components) {
    if (c.mean.size() != r || c.cov.rows() != r || c.cov.cols() != r) {
      throw InvalidParams("generator: inconsistent component dimensions");
    }
    if (c.skew.size() != 0 && c.skew.size() != r) {
      throw InvalidParams("generator: skew vector has the wrong length");
    }
    if (!(c.weight >= 0.0)) throw InvalidParams("generator: negative weight");
    if (c.cluster < 0) throw InvalidParams("generator: negative cluster label");
    try {
      cholesky(c.cov);
    } catch (const Error& e) {
      throw InvalidParams(std::string("generator: covariance: ") + e.what());
    }
    total += c.weight;
    seen[c.cluster] = true;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidParams("generator: weights do not sum to one");
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw InvalidParams("generator: cluster labels are not contiguous");
  }
}

namespace {

template <typename Emit>
SimulatedData simulate(const GeneratorSpec& spec, int N, RandomSeed seed, Emit emit) {
  spec.validate();
  if (N < 2) throw InvalidCount("generator: need N >= 2");
  const int G = static_cast<int>(spec.components.size());
  const int r = spec.dim();
  std::vector<double> log_w(static_cast<std::size_t>(G));
  std::vector<Matrix> chol;
  for (int g = 0; g < G; ++g) {
    log_w[g] = std::log(spec.components[g].weight);
    chol.push_back(cholesky(spec.components[g].cov));
  }
  Rng rng(seed);
  RowMatrix y(N, r);
  Labels comp(static_cast<std::size_t>(N));
  Labels clus(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const int g = sample_categorical_log(log_w.data(), G, rng);
    comp[i] = g;
    clus[i] = spec.components[g].cluster;
    y.row(i) = emit(spec.components[g], chol[g], rng).transpose();
  }
  return SimulatedData{DataSet::from_rows(std::move(y)), std::move(clus), std::move(comp)};
}

}  // namespace

SimulatedData sample_gaussian_mixture(const GeneratorSpec& spec, int N, RandomSeed seed) {
  return simulate(spec, N, seed, [](const GeneratorComponent& c, const Matrix& l, Rng& rng) {
    return sample_mvn_chol(c.mean, l, rng);
  });
}

SimulatedData sample_sal_mixture(const GeneratorSpec& spec, int N, RandomSeed seed) {
  return simulate(spec, N, seed, [](const GeneratorComponent& c, const Matrix& l, Rng& rng) {
    const double w = -std::log(rng.uniform());
    Vector z(c.mean.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
    Vector y = c.mean + std::sqrt(w) * (l * z);
    if (c.skew.size() > 0) y += w * c.skew;
    return y;
  });
}

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

GeneratorSpec setup_I_spec() {
  GeneratorSpec s;
  const double third = 1.0 / 12.0;
  const double half = 1.0 / 8.0;
  s.components = {
      {vec2(6.0, 1.5), mat2(4.84, 0.0, 0.0, 2.89), {}, third, 0},
      {vec2(4.0, 6.0), mat2(3.61, 5.05, 5.05, 14.44), {}, third, 0},
      {vec2(8.0, 6.0), mat2(3.61, -5.05, -5.05, 14.44), {}, third, 0},
      {vec2(22.5, 1.5), mat2(12.25, 0.0, 0.0, 3.24), {}, half, 1},
      {vec2(20.0, 8.0), mat2(3.24, 0.0, 0.0, 12.25), {}, half, 1},
      {vec2(22.0, 31.0), mat2(14.44, 0.0, 0.0, 2.25), {}, half, 2},
      {vec2(22.0, 31.0), mat2(2.25, 0.0, 0.0, 17.64), {}, half, 2},
      {vec2(6.5, 29.0), mat2(2.25, 4.2, 4.2, 16.0), {}, 0.25, 3},
  };
  return s;
}

SimulatedData setup_I(RandomSeed seed) {
  return sample_gaussian_mixture(setup_I_spec(), kSetupISize, seed);
}

GeneratorSpec setup_II_spec() {
  GeneratorSpec s;
  const Matrix id = Matrix::Identity(2, 2);
  const double w = 1.0 / 3.0;
  s.components = {
      {vec2(2.0, 2.0), id, {}, w, 0},
      {vec2(4.2, 4.2), id, {}, w, 0},
      {vec2(7.8, 7.8), id, {}, w, 1},
  };
  return s;
}

SimulatedData setup_II(RandomSeed seed) {
  return sample_gaussian_mixture(setup_II_spec(), kSetupIISize, seed);
}

GeneratorSpec default_sal_spec() {
  GeneratorSpec s;
  s.components = {
      {vec2(0.0, 0.0), mat2(1.0, 0.3, 0.3, 0.5), vec2(2.0, 1.0), 0.5, 0},
      {vec2(4.0, 4.0), mat2(0.5, -0.2, -0.2, 1.0), vec2(-1.0, 2.5), 0.5, 1},
  };
  return s;
}

namespace {

using nlohmann::json;

Vector to_vector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix to_matrix(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (static_cast<Eigen::Index>(rows[a].size()) != n) throw FormatError("matrix is not square");
    for (Eigen::Index b = 0; b < n; ++b) m(a, b) = rows[a][b];
  }
  return m;
}

json from_vector(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json from_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index b = 0; b < m.cols(); ++b) row[b] = m(a, b);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

GeneratorSpec parse_generator_spec(const std::string& json_text) {
  GeneratorSpec spec;
  try {
    const json doc = json::parse(json_text);
    for (const json& c : doc.at("components")) {
      GeneratorComponent g;
      g.mean = to_vector(c.at("mean"));
      if (c.contains("skew")) {
        g.skew = to_vector(c.at("skew"));
        g.cov = to_matrix(c.contains("scale") ? c.at("scale") : c.at("cov"));
      } else {
        g.cov = to_matrix(c.at("cov"));
      }
      g.weight = c.at("weight").get<double>();
      g.cluster = c.value("cluster", 1) - 1;
      spec.components.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("generator spec: ") + e.what());
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("generator spec: ") + e.what());
  }
  return spec;
}

std::string serialize_generator_spec(const GeneratorSpec& spec) {
  json comps = json::array();
  for (const auto& c : spec.components) {
    json j;
    j["mean"] = from_vector(c.mean);
    if (c.skew.size() > 0) {
      j["skew"] = from_vector(c.skew);
      j["scale"] = from_matrix(c.cov);
    } else {
      j["cov"] = from_matrix(c.cov);
    }
    j["weight"] = c.weight;
    j["cluster"] = c.cluster + 1;
    comps.push_back(std::move(j));
  }
  return json{{"components", comps}}.dump(2);
}

std::vector<int> subsample_indices(int total, int n, RandomSeed seed) {
  if (n < 0 || n > total) throw InvalidCount("subsample: n must lie in [0, total]");
  std::vector<int> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // partial Fisher-Yates
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(total - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace smm
