#include "smm/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "smm/errors.hpp"

namespace smm {

Rng::Rng(RandomSeed seed) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed.seed), hi(seed.seed), lo(seed.stream), hi(seed.stream)};
  engine_.seed(seq);
}

double Rng::uniform() {
  // 53 random bits centred in their cell: never exactly 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

namespace {

// Marsaglia & Tsang (2000), shape >= 1.
double gamma_shape_ge_one(double shape, Rng& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_log_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidShape("gamma: shape must be positive and finite");
  }
  if (shape >= 1.0) return std::log(gamma_shape_ge_one(shape, rng));
  // Gamma(a) = Gamma(a + 1) * U^(1/a)
  const double g = gamma_shape_ge_one(shape + 1.0, rng);
  return std::log(g) + std::log(rng.uniform()) / shape;
}

double sample_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidShape("gamma: shape must be positive and finite");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidRate("gamma: rate must be positive and finite");
  }
  if (shape >= 1.0) return gamma_shape_ge_one(shape, rng) / rate;
  return std::exp(sample_log_gamma(shape, rng)) / rate;
}

Vector sample_dirichlet(const Vector& concentration, Rng& rng) {
  const Eigen::Index n = concentration.size();
  if (n == 0) throw InvalidConcentration("dirichlet: empty concentration vector");
  Vector log_g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = concentration[i];
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InvalidConcentration("dirichlet: concentration entries must be positive");
    }
    log_g[i] = sample_log_gamma(c, rng);
  }
  const double top = log_g.maxCoeff();
  Vector out = (log_g.array() - top).exp().matrix();
  out /= out.sum();
  return out;
}

Vector sample_mvn_chol(const Vector& mean, const Matrix& chol_lower, Rng& rng) {
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + chol_lower.triangularView<Eigen::Lower>() * z;
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng) {
  return sample_mvn_chol(mean, cholesky(cov), rng);
}

Matrix sample_wishart(double shape, const Matrix& rate, Rng& rng) {
  const Eigen::Index r = rate.rows();
  if (rate.cols() != r || r == 0) throw InvalidParams("wishart: rate must be square");
  if (!(shape > 0.5 * static_cast<double>(r - 1)) || !std::isfinite(shape)) {
    throw InvalidShape("wishart: shape must exceed (r-1)/2");
  }
  const Matrix scale_chol = cholesky(0.5 * spd_inverse(rate));

  // Bartlett factor for df = 2 * shape: A_jj^2 ~ chi2(2a - j) = 2 Gamma(a - j/2).
  Matrix a = Matrix::Zero(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    a(j, j) = std::sqrt(2.0 * sample_gamma(shape - 0.5 * static_cast<double>(j), 1.0, rng));
    for (Eigen::Index k = 0; k < j; ++k) a(j, k) = rng.normal();
  }
  const Matrix la = scale_chol * a;
  return symmetrized(la * la.transpose());
}

namespace {

double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0) {
    return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  }
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

// The three samplers below draw from the two-parameter form
// f(x) ∝ x^(lambda-1) exp(-omega/2 (x + 1/x)), lambda >= 0.

// Ratio-of-uniforms without mode shift.
double gig_rou_noshift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym =
      ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Ratio-of-uniforms with mode shift; bounding rectangle from Cardano's rule.
double gig_rou_shift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);

  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = (2.0 * (lambda - 1.0) * xm / omega - 1.0);
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);

  for (;;) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x <= 0.0) continue;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Rejection from a piecewise hat (constant / power / exponential) for the
// non-T-concave region lambda < 1, omega <= 0.2.
double gig_concave_split(double lambda, double omega, Rng& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  double area[3];
  area[0] = k0 * x0;
  double k1;
  double k2;
  if (x0 >= 2.0 / omega) {
    k1 = 0.0;
    area[1] = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    area[1] = (lambda == 0.0)
                  ? k1 * std::log(2.0 / (omega * omega))
                  : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = area[0] + area[1] + area[2];

  for (;;) {
    double v = total * rng.uniform();
    double x;
    double hx;
    if (v <= area[0]) {
      x = x0 * v / area[0];
      hx = k0;
    } else if ((v -= area[0]) <= area[1]) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + (lambda / k1 * v), 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= area[1];
      const double lo = (x0 > 2.0 / omega) ? x0 : 2.0 / omega;
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * lo) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

}  // namespace

double sample_gig(double p, double a, double b, Rng& rng) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(p)) {
    throw InvalidParams("gig: a and b must be positive and finite");
  }
  // X = alpha * Y with Y ~ GIG(|p|, omega, omega); negative p via 1/Y.
  const double lambda = std::abs(p);
  const double alpha = std::sqrt(b / a);
  const double omega = std::sqrt(a * b);

  double y;
  if (lambda > 2.0 || omega > 3.0) {
    y = gig_rou_shift(lambda, omega, rng);
  } else if (lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    y = gig_rou_noshift(lambda, omega, rng);
  } else {
    y = gig_concave_split(lambda, omega, rng);
  }
  return p < 0.0 ? alpha / y : alpha * y;
}

int sample_categorical_log(const double* log_weights, int n, Rng& rng) {
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) top = std::max(top, log_weights[i]);
  if (!std::isfinite(top)) return -1;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += std::exp(log_weights[i] - top);
  double u = rng.uniform() * total;
  int last = -1;
  for (int i = 0; i < n; ++i) {
    if (log_weights[i] == -std::numeric_limits<double>::infinity()) continue;
    last = i;
    u -= std::exp(log_weights[i] - top);
    if (u <= 0.0) return i;
  }
  return last;
}

}  // namespace smm
