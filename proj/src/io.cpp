#include "smm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "smm/errors.hpp"

namespace smm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<int>(j);
  }
  return -1;
}

CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw FormatError("csv: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  t.header = split_commas(line);
  const std::size_t cols = t.header.size();

  std::vector<double> cells;
  long rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto parts = split_commas(line);
    if (parts.size() != cols) {
      throw FormatError("csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(cols) + " fields, found " + std::to_string(parts.size()));
    }
    for (const auto& p : parts) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
      if (ec != std::errc() || ptr != p.data() + p.size()) {
        throw FormatError("csv line " + std::to_string(lineno) + ": non-numeric field '" + p + "'");
      }
      cells.push_back(v);
    }
    ++rows;
  }
  t.values = Eigen::Map<RowMatrix>(cells.data(), rows, static_cast<Eigen::Index>(cols));
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return parse_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Labels encode_labels(const std::vector<double>& raw) {
  std::map<double, int> codes;
  Labels out;
  out.reserve(raw.size());
  for (double v : raw) {
    const auto [it, inserted] = codes.emplace(v, static_cast<int>(codes.size()));
    out.push_back(it->second);
  }
  return out;
}

namespace {

Labels one_based_column(const CsvTable& t, int j, const std::string& path) {
  Labels out(static_cast<std::size_t>(t.values.rows()));
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    const double v = t.values(i, j);
    if (v < 1.0 || v != std::floor(v)) {
      throw FormatError(path + ": column '" + t.header[j] + "' must hold positive integers");
    }
    out[i] = static_cast<int>(v) - 1;
  }
  return out;
}

}  // namespace

LabeledData read_data_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  LabeledData d;
  const int jc = t.column("component");
  const int jk = t.column("cluster");
  std::vector<Eigen::Index> feats;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (static_cast<int>(j) == jc || static_cast<int>(j) == jk) continue;
    feats.push_back(static_cast<Eigen::Index>(j));
    d.feature_names.push_back(t.header[j]);
  }
  if (feats.empty()) throw FormatError(path + ": no feature columns");
  d.features.resize(t.values.rows(), static_cast<Eigen::Index>(feats.size()));
  for (std::size_t a = 0; a < feats.size(); ++a) d.features.col(a) = t.values.col(feats[a]);
  if (jc >= 0) d.component = one_based_column(t, jc, path);
  if (jk >= 0) d.cluster = one_based_column(t, jk, path);
  return d;
}

std::string format_real(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_data_csv(const std::string& path, const RowMatrix& features, const Labels* component,
                    const Labels* cluster) {
  std::ofstream out = open_out(path);
  for (Eigen::Index j = 0; j < features.cols(); ++j) out << (j ? "," : "") << "y" << j + 1;
  if (component) out << ",component";
  if (cluster) out << ",cluster";
  out << '\n';
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      out << (j ? "," : "") << format_real(features(i, j));
    }
    if (component) out << ',' << (*component)[i] + 1;
    if (cluster) out << ',' << (*cluster)[i] + 1;
    out << '\n';
  }
}

Labels read_label_column(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.header.empty()) throw FormatError(path + ": no columns");
  int j = -1;
  for (const char* name : {"cluster", "S_hat", "label"}) {
    j = t.column(name);
    if (j >= 0) break;
  }
  if (j < 0) j = static_cast<int>(t.header.size()) - 1;
  const Eigen::VectorXd col = t.values.col(j);
  return encode_labels(std::vector<double>(col.data(), col.data() + col.size()));
}

namespace {

void put_vector(std::string& s, const Vector& v) {
  s += '[';
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (j) s += ',';
    s += format_real(v[j]);
  }
  s += ']';
}

void put_matrix(std::string& s, const Matrix& m) {
  s += '[';
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    if (a) s += ',';
    s += '[';
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      if (b) s += ',';
      s += format_real(m(a, b));
    }
    s += ']';
  }
  s += ']';
}

std::string draw_record(const Draw& d) {
  std::string s;
  s.reserve(16384);
  s += "{\"iter\":" + std::to_string(d.iter) + ",\"eta\":";
  put_vector(s, d.params.eta);
  s += ",\"clusters\":[";
  for (int k = 0; k < d.params.clusters_count(); ++k) {
    const ClusterParams& c = d.params.clusters[k];
    if (k) s += ',';
    s += "{\"w\":";
    put_vector(s, c.w);
    s += ",\"mu\":[";
    for (int l = 0; l < c.subcomponents(); ++l) {
      if (l) s += ',';
      put_vector(s, c.mu[l]);
    }
    s += "],\"sigma\":[";
    for (int l = 0; l < c.subcomponents(); ++l) {
      if (l) s += ',';
      put_matrix(s, c.sigma[l]);
    }
    s += "],\"b0\":";
    put_vector(s, d.b0.empty() ? Vector() : d.b0[k]);
    s += ",\"lambda\":";
    put_vector(s, d.lambda.empty() ? Vector() : d.lambda[k]);
    s += '}';
  }
  s += "],\"S\":[";
  for (std::size_t i = 0; i < d.S.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(d.S[i] + 1);
  }
  s += "],\"K0\":" + std::to_string(d.K0) + "}\n";
  return s;
}

using nlohmann::json;

Vector json_vector(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t a = 0; a < j.size(); ++a) v[static_cast<Eigen::Index>(a)] = j[a].get<double>();
  return v;
}

Matrix json_matrix(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (static_cast<Eigen::Index>(j[a].size()) != n) throw FormatError("matrix is not square");
    for (Eigen::Index b = 0; b < n; ++b) m(a, b) = j[a][b].get<double>();
  }
  return m;
}

Draw parse_draw(const json& j) {
  Draw d;
  d.iter = j.at("iter").get<long>();
  d.params.eta = json_vector(j.at("eta"));
  for (const json& c : j.at("clusters")) {
    ClusterParams p;
    p.w = json_vector(c.at("w"));
    for (const json& m : c.at("mu")) p.mu.push_back(json_vector(m));
    for (const json& m : c.at("sigma")) p.sigma.push_back(json_matrix(m));
    if (static_cast<Eigen::Index>(p.mu.size()) != p.w.size() ||
        static_cast<Eigen::Index>(p.sigma.size()) != p.w.size()) {
      throw FormatError("cluster has inconsistent subcomponent counts");
    }
    d.params.clusters.push_back(std::move(p));
    d.b0.push_back(json_vector(c.at("b0")));
    d.lambda.push_back(json_vector(c.at("lambda")));
  }
  if (static_cast<Eigen::Index>(d.params.clusters.size()) != d.params.eta.size()) {
    throw FormatError("eta and clusters differ in length");
  }
  const int K = d.params.clusters_count();
  for (const json& s : j.at("S")) {
    const int v = s.get<int>();
    if (v < 1 || v > K) throw FormatError("label out of range");
    d.S.push_back(v - 1);
  }
  d.K0 = j.at("K0").get<int>();
  if (d.K0 != count_nonempty(d.S, K)) throw FormatError("K0 disagrees with S");
  return d;
}

}  // namespace

void write_chain(std::ostream& out, const ChainOutput& chain) {
  for (const Draw& d : chain.draws) out << draw_record(d);
}

void write_chain_file(const std::string& path, const ChainOutput& chain) {
  std::ofstream out = open_out(path);
  write_chain(out, chain);
  if (!out) throw FormatError("error writing " + path);
}

ChainOutput read_chain(std::istream& in) {
  ChainOutput chain;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      chain.draws.push_back(parse_draw(json::parse(line)));
    } catch (const json::exception& e) {
      throw FormatError("chain record " + std::to_string(lineno) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError("chain record " + std::to_string(lineno) + ": " + e.what());
    }
    const Draw& first = chain.draws.front();
    const Draw& d = chain.draws.back();
    if (d.params.clusters_count() != first.params.clusters_count() ||
        d.params.clusters.front().subcomponents() != first.params.clusters.front().subcomponents() ||
        d.S.size() != first.S.size()) {
      throw FormatError("chain record " + std::to_string(lineno) + ": shape differs from record 1");
    }
    chain.K0_trace.push_back(d.K0);
  }
  if (chain.draws.empty()) throw FormatError("chain has no records");
  chain.config.K = chain.draws.front().params.clusters_count();
  chain.config.L = chain.draws.front().params.clusters.front().subcomponents();
  chain.config.iterations = static_cast<long>(chain.draws.size());
  chain.config.burnin = 0;
  return chain;
}

ChainOutput read_chain_file(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return read_chain(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string identified_model_json(const IdentifiedModel& m) {
  json j;
  j["K0_hat"] = m.K0_hat;
  j["M0"] = m.M0;
  j["M0_rho"] = m.M0_rho;
  j["entropy"] = m.entropy;
  std::vector<int> s(m.S_hat.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = m.S_hat[i] + 1;
  j["S_hat"] = s;
  json t = json::array();
  for (Eigen::Index i = 0; i < m.t.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.t.cols()));
    for (Eigen::Index k = 0; k < m.t.cols(); ++k) row[k] = m.t(i, k);
    t.push_back(row);
  }
  j["t"] = std::move(t);
  json cs = json::array();
  for (const ClusterSummary& c : m.clusters) {
    cs.push_back({{"eta", c.eta}, {"mu", std::vector<double>(c.mu.data(), c.mu.data() + c.mu.size())}});
  }
  j["cluster_summaries"] = std::move(cs);
  if (!m.warning.empty()) j["warning"] = m.warning;
  return j.dump(1) + "\n";
}

void write_identified_model(const std::string& path, const IdentifiedModel& model) {
  write_text_file(path, identified_model_json(model));
}

void write_labels_csv(const std::string& path, const IdentifiedModel& m) {
  std::ofstream out = open_out(path);
  out << "id,S_hat,max_t\n";
  for (std::size_t i = 0; i < m.S_hat.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out << i + 1 << ',' << m.S_hat[i] + 1 << ',' << format_real(m.t.row(row).maxCoeff()) << '\n';
  }
}

void write_similarity_csv(const std::string& path, const Matrix& sim) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    for (Eigen::Index j = 0; j < sim.cols(); ++j) out << (j ? "," : "") << format_real(sim(i, j));
    out << '\n';
  }
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t data_hash(const RowMatrix& features) {
  const std::int64_t shape[2] = {features.rows(), features.cols()};
  std::uint64_t h = fnv1a64(shape, sizeof shape);
  const std::uint64_t body =
      fnv1a64(features.data(), static_cast<std::size_t>(features.size()) * sizeof(double));
  return fnv1a64(&body, sizeof body) ^ h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw FormatError("error writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace smm
