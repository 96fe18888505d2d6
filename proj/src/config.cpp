#include "smm/config.hpp"

#include <charconv>
#include <sstream>

#include "smm/errors.hpp"
#include "smm/io.hpp"

namespace smm {

void RunConfig::validate() const {
  if (K < 1) throw InvalidConfig("K must be at least 1");
  if (L < 1) throw InvalidConfig("L must be at least 1");
  Proportions(phi_b, phi_w);
  if (!(e0 > 0.0)) throw InvalidConfig("e0 must be positive");
  if (!(nu > 0.0)) throw InvalidConfig("nu must be positive");
  if (burnin < 0) throw InvalidConfig("burnin must be non-negative");
  if (iterations < 1) throw InvalidConfig("iterations must be at least 1");
  if (thin < 1) throw InvalidConfig("thin must be at least 1");
  if (seeds.empty()) throw InvalidConfig("at least one seed is required");
}

std::string variant_name(Variant v) {
  return v == Variant::Hierarchical ? "hier" : "fixed";
}

Variant parse_variant(const std::string& name) {
  if (name == "hier") return Variant::Hierarchical;
  if (name == "fixed") return Variant::FixedC0Lambda1;
  throw InvalidConfig("variant must be 'hier' or 'fixed', got '" + name + "'");
}

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  std::string v = s.substr(b, e - b + 1);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return v;
}

template <typename T>
T number(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidConfig("config key '" + key + "': cannot parse '" + v + "'");
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig cfg) {
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string v = strip(line.substr(eq + 1));
    if (key == "data") cfg.data = v;
    else if (key == "K") cfg.K = number<int>(key, v);
    else if (key == "L") cfg.L = number<int>(key, v);
    else if (key == "phi_b") cfg.phi_b = number<double>(key, v);
    else if (key == "phi_w") cfg.phi_w = number<double>(key, v);
    else if (key == "e0") cfg.e0 = number<double>(key, v);
    else if (key == "nu") cfg.nu = number<double>(key, v);
    else if (key == "variant") cfg.variant = parse_variant(v);
    else if (key == "burnin") cfg.burnin = number<long>(key, v);
    else if (key == "iterations") cfg.iterations = number<long>(key, v);
    else if (key == "thin") cfg.thin = number<int>(key, v);
    else if (key == "out") cfg.out = v;
    else if (key == "seeds") {
      cfg.seeds.clear();
      std::istringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) {
        cfg.seeds.push_back(number<std::uint64_t>(key, strip(item)));
      }
    } else {
      throw InvalidConfig("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "data = \"" << cfg.data << "\"\n"
      << "K = " << cfg.K << "\n"
      << "L = " << cfg.L << "\n"
      << "phi_b = " << format_real(cfg.phi_b) << "\n"
      << "phi_w = " << format_real(cfg.phi_w) << "\n"
      << "e0 = " << format_real(cfg.e0) << "\n"
      << "nu = " << format_real(cfg.nu) << "\n"
      << "variant = " << variant_name(cfg.variant) << "\n"
      << "burnin = " << cfg.burnin << "\n"
      << "iterations = " << cfg.iterations << "\n"
      << "thin = " << cfg.thin << "\n"
      << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) out << (i ? ", " : "") << cfg.seeds[i];
  out << "\nout = \"" << cfg.out << "\"\n";
  return out.str();
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const FormatError&) {
    throw InvalidConfig("cannot read config file " + path);
  }
  return parse_config(text, std::move(base));
}

ChainConfig chain_config(const RunConfig& cfg, std::uint64_t seed) {
  ChainConfig c;
  c.K = cfg.K;
  c.L = cfg.L;
  c.burnin = cfg.burnin;
  c.iterations = cfg.iterations;
  c.thin = cfg.thin;
  c.seed = chain_seed(seed);
  return c;
}

FixedHyperparameters hyperparameters(const RunConfig& cfg, const DataSet& data) {
  return derive_hyperparameters(data, cfg.K, cfg.L, Proportions(cfg.phi_b, cfg.phi_w), cfg.e0,
                                cfg.nu, cfg.variant);
}

}  // namespace smm
