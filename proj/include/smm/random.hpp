#pragma once

#include <cstdint>
#include <random>

#include "smm/linalg.hpp"

namespace smm {

/// Identifies one reproducible variate stream. Equal (seed, stream) pairs give
/// bit-identical sequences on the same build; chains running concurrently must
/// use distinct stream ids.
struct RandomSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RandomSeed&, const RandomSeed&) = default;
};

class Rng {
 public:
  explicit Rng(RandomSeed seed);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal() { return normal_(engine_); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Gamma(shape, rate) with mean shape / rate.
double sample_gamma(double shape, double rate, Rng& rng);

/// log of a Gamma(shape, 1) variate. Stable for very small shapes, where the
/// variate itself underflows double precision.
double sample_log_gamma(double shape, Rng& rng);

/// Dirichlet draw; entries are non-negative and sum to one within 1e-12.
/// Throws InvalidConcentration on a non-positive entry.
Vector sample_dirichlet(const Vector& concentration, Rng& rng);

Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng);

/// Same as sample_mvn with a precomputed lower Cholesky factor of cov.
Vector sample_mvn_chol(const Vector& mean, const Matrix& chol_lower, Rng& rng);

/// Wishart draw in the shape/rate convention W_r(a, B):
///
///   density  p(X) ∝ |X|^(a - (r+1)/2) exp(-tr(B X)),   E(X) = a B^-1.
///
/// This is the convention the conjugate updates rely on: a precision with
/// prior W_r(c, C) and n Gaussian observations has posterior
/// W_r(c + n/2, C + S/2), where S is the scatter matrix. It equals the
/// degrees-of-freedom Wishart with df = 2a and scale (2B)^-1, so
/// Var(X_jj) = a * ((B^-1)_jj)^2 (not 2a). Regular iff a > (r-1)/2; otherwise
/// InvalidShape. Non-integer shapes are supported (Bartlett construction).
Matrix sample_wishart(double shape, const Matrix& rate, Rng& rng);

/// Generalized inverse Gaussian with density ∝ x^(p-1) exp(-(a x + b / x) / 2).
/// Requires a > 0 and b > 0 (InvalidParams otherwise). Uses the
/// Hörmann–Leydold rejection family, valid for every real p.
double sample_gig(double p, double a, double b, Rng& rng);

/// Index drawn with probability ∝ exp(log_weights[i]). Entries equal to -inf
/// are never drawn. Returns -1 when every entry is -inf.
int sample_categorical_log(const double* log_weights, int n, Rng& rng);

}  // namespace smm
