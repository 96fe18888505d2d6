#pragma once

#include <string>
#include <vector>

#include "smm/model.hpp"
#include "smm/random.hpp"

namespace smm {

struct GeneratorComponent {
  Vector mean;
  Matrix cov;   // Gaussian covariance, or the SAL scale matrix
  Vector skew;  // SAL skewness; empty for Gaussian components
  double weight = 0.0;
  int cluster = 0;  // zero-based true cluster
};

struct GeneratorSpec {
  std::vector<GeneratorComponent> components;

  int dim() const;
  int clusters() const;
  bool skewed() const;

  /// Weights on the simplex (1e-9), shared dimension, PD covariances,
  /// cluster labels covering 0..max. Throws InvalidParams.
  void validate() const;
};

struct SimulatedData {
  DataSet data;
  Labels cluster;
  Labels component;
};

SimulatedData sample_gaussian_mixture(const GeneratorSpec& spec, int N, RandomSeed seed);

/// Y = mu + W alpha + sqrt(W) chol(Sigma) Z, W ~ Exp(1), Z ~ N(0, I).
SimulatedData sample_sal_mixture(const GeneratorSpec& spec, int N, RandomSeed seed);

/// Eight Gaussian components in four clusters (triangle, L-shape, cross,
/// ellipse).
GeneratorSpec setup_I_spec();
SimulatedData setup_I(RandomSeed seed);
inline constexpr int kSetupISize = 800;

/// Three unit-covariance Gaussians on the diagonal; the first two form one
/// cluster.
GeneratorSpec setup_II_spec();
SimulatedData setup_II(RandomSeed seed);
inline constexpr int kSetupIISize = 300;

/// Two skewed components with long tails pointing away from each other.
GeneratorSpec default_sal_spec();

/// {"components": [{"mean": [..], "cov": [[..]], "weight": w, "cluster": c}, ...]}
/// with "scale" and "skew" in place of "cov" for SAL components; cluster
/// labels one-based. Throws FormatError.
GeneratorSpec parse_generator_spec(const std::string& json_text);
std::string serialize_generator_spec(const GeneratorSpec& spec);

/// n rows drawn uniformly without replacement, kept in their original order.
std::vector<int> subsample_indices(int total, int n, RandomSeed seed);

}  // namespace smm
