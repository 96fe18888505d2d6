#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smm/model.hpp"
#include "smm/sampler.hpp"

namespace smm {

struct RunConfig {
  std::string data;
  int K = 10;
  int L = 4;
  double phi_b = 0.5;
  double phi_w = 0.1;
  double e0 = 0.001;
  double nu = 10.0;
  Variant variant = Variant::Hierarchical;
  long burnin = 4000;
  long iterations = 4000;
  int thin = 1;
  std::vector<std::uint64_t> seeds{1};
  std::string out = ".";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Throws InvalidConfig.
  void validate() const;
};

std::string variant_name(Variant v);  // "hier" or "fixed"
Variant parse_variant(const std::string& name);

/// Flat `key = value` lines; `#` starts a comment; seeds are comma separated.
/// Unknown keys and malformed values throw InvalidConfig.
RunConfig parse_config(const std::string& text, RunConfig base = {});
std::string serialize_config(const RunConfig& cfg);
RunConfig load_config(const std::string& path, RunConfig base = {});

ChainConfig chain_config(const RunConfig& cfg, std::uint64_t seed);
FixedHyperparameters hyperparameters(const RunConfig& cfg, const DataSet& data);

/// Streams derived from one user seed.
inline RandomSeed chain_seed(std::uint64_t seed) { return {seed, 0}; }
inline RandomSeed data_seed(std::uint64_t seed) { return {seed, 1}; }
inline RandomSeed identify_seed(std::uint64_t seed) { return {seed, 2}; }

}  // namespace smm
