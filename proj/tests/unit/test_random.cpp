#include <algorithm>
#include <cmath>
#include <limits>

#include "smm/errors.hpp"
#include "smm/linalg.hpp"
#include "smm/random.hpp"
#include "testing.hpp"

using namespace smm;
using smm::testing::moments;
using smm::testing::within_se;

namespace {

constexpr int kDraws = 100000;

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// E[X] under x^(p-1) exp(-(a x + b / x) / 2), by quadrature in log x.
double gig_mean_quadrature(double p, double a, double b) {
  const int n = 400000;
  const double lo = -25.0, hi = 25.0, h = (hi - lo) / n;
  // shift by the log-density maximum to avoid overflow
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double u = lo + i * h, x = std::exp(u);
    shift = std::max(shift, p * u - 0.5 * (a * x + b / x));
  }
  double z = 0.0, m = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = lo + i * h, x = std::exp(u);
    const double w = ((i == 0 || i == n) ? 0.5 : 1.0) * std::exp(p * u - 0.5 * (a * x + b / x) - shift);
    z += w;
    m += w * x;
  }
  return m / z;
}

}  // namespace

TEST_CASE("cholesky reconstructs and rejects indefinite input") {
  CHECK(cholesky(Matrix::Identity(2, 2)).isApprox(Matrix::Identity(2, 2)));
  const Matrix a = mat2(4, 2, 2, 3);
  const Matrix l = cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(l(0, 1) == 0.0);
  CHECK((l * l.transpose() - a).norm() <= 1e-10 * a.norm());
  CHECK_THROWS_AS(cholesky(mat2(1, 2, 2, 1)), NotPositiveDefinite);
  CHECK_THROWS_AS(cholesky(mat2(1, 0.5, 0.2, 1)), NotSymmetric);
}

TEST_CASE("cholesky jitter rescues a singular PSD matrix once") {
  const Matrix singular = mat2(1, 1, 1, 1);
  const Matrix l = cholesky(singular);
  CHECK((l * l.transpose() - singular).norm() < 1e-8);
}

TEST_CASE("log_mvn_density matches the closed form") {
  const Matrix cov = mat2(4, 2, 2, 3);
  Vector y(2), mu(2);
  y << 1.0, -0.5;
  mu << 0.2, 0.3;
  const Vector d = y - mu;
  const double expected =
      -std::log(2 * M_PI) - 0.5 * std::log(cov.determinant()) - 0.5 * d.dot(cov.inverse() * d);
  CHECK(log_mvn_density(y, mu, cholesky(cov)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("identical seeds give identical streams") {
  Rng a({42, 3}), b({42, 3}), c({42, 4});
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differs |= x != c.normal();
  }
  CHECK(differs);
}

TEST_CASE("uniform stays in the open unit interval") {
  Rng rng({1, 0});
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("multivariate normal moments") {
  Rng rng({2, 0});
  SUBCASE("standard") {
    double s0 = 0, s1 = 0;
    for (int i = 0; i < kDraws; ++i) {
      const Vector x = sample_mvn(Vector::Zero(2), Matrix::Identity(2, 2), rng);
      s0 += x[0];
      s1 += x[1];
    }
    CHECK(std::abs(s0 / kDraws) < 4.0 / std::sqrt(kDraws));
    CHECK(std::abs(s1 / kDraws) < 4.0 / std::sqrt(kDraws));
  }
  SUBCASE("degenerate covariance") {
    Vector mu(2);
    mu << 3.0, -1.0;
    for (int i = 0; i < 100; ++i) {
      CHECK((sample_mvn(mu, 1e-30 * Matrix::Identity(2, 2), rng) - mu).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("correlated covariance") {
    const Matrix cov = mat2(4, 2, 2, 3);
    Matrix acc = Matrix::Zero(2, 2);
    Vector mean = Vector::Zero(2);
    std::vector<Vector> xs;
    for (int i = 0; i < kDraws; ++i) xs.push_back(sample_mvn(Vector::Zero(2), cov, rng));
    for (const auto& x : xs) mean += x;
    mean /= kDraws;
    for (const auto& x : xs) acc += (x - mean) * (x - mean).transpose();
    acc /= kDraws - 1;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) CHECK(std::abs(acc(a, b) - cov(a, b)) <= 0.05 * std::abs(cov(a, b)));
    }
  }
}

TEST_CASE("gamma moments and mass") {
  Rng rng({3, 0});
  std::vector<double> x(kDraws);
  for (auto& v : x) v = sample_gamma(10.0, 10.0, rng);
  const auto m = moments(x);
  CHECK(std::abs(m.mean - 1.0) < 0.03);
  CHECK(std::abs(m.var - 0.1) < 0.003);
  CHECK(within_se(m.mean, 1.0, m.se_mean));
  CHECK(within_se(m.var, 0.1, m.se_var));
  const double inside =
      std::count_if(x.begin(), x.end(), [](double v) { return v >= 0.5 && v <= 1.5; }) /
      static_cast<double>(kDraws);
  CHECK(inside == doctest::Approx(0.9).epsilon(0.02));

  for (auto& v : x) v = sample_gamma(1.0, 2.0, rng);
  CHECK(std::abs(moments(x).mean - 0.5) < 0.015);

  for (auto& v : x) v = sample_gamma(0.3, 1.0, rng);
  const auto small = moments(x);
  CHECK(within_se(small.mean, 0.3, small.se_mean));
  CHECK(within_se(small.var, 0.3, small.se_var));

  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), InvalidShape);
  CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), InvalidRate);
}

TEST_CASE("log gamma is finite where the gamma variate underflows") {
  Rng rng({4, 0});
  for (int i = 0; i < 1000; ++i) {
    const double lg = sample_log_gamma(0.001, rng);
    REQUIRE(std::isfinite(lg));
  }
}

TEST_CASE("dirichlet") {
  Rng rng({5, 0});
  SUBCASE("symmetric means") {
    Vector sum = Vector::Zero(3);
    for (int i = 0; i < kDraws; ++i) {
      const Vector d = sample_dirichlet(Vector::Ones(3), rng);
      REQUIRE(std::abs(d.sum() - 1.0) < 1e-12);
      REQUIRE(d.minCoeff() >= 0.0);
      sum += d;
    }
    for (int k = 0; k < 3; ++k) CHECK(std::abs(sum[k] / kDraws - 1.0 / 3.0) < 0.01);
  }
  SUBCASE("sparse concentration puts mass on one vertex") {
    int near_vertex = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const Vector d = sample_dirichlet(Vector::Constant(10, 0.001), rng);
      REQUIRE(std::abs(d.sum() - 1.0) < 1e-12);
      near_vertex += d.maxCoeff() > 0.99;
    }
    CHECK(near_vertex > 0.95 * n);
  }
  SUBCASE("asymmetric means") {
    Vector c(3);
    c << 5.001, 0.001, 3.001;
    Vector sum = Vector::Zero(3);
    for (int i = 0; i < kDraws; ++i) sum += sample_dirichlet(c, rng);
    const Vector expected = c / c.sum();
    for (int k = 0; k < 3; ++k) CHECK(std::abs(sum[k] / kDraws - expected[k]) < 0.01);
  }
  SUBCASE("rejects non-positive concentration") {
    Vector c(2);
    c << 1.0, 0.0;
    CHECK_THROWS_AS(sample_dirichlet(c, rng), InvalidConcentration);
  }
}

TEST_CASE("wishart mean and variance") {
  Rng rng({6, 0});
  const double shape = 5.0;
  const Matrix rate = Matrix::Identity(2, 2);
  std::vector<double> x00(kDraws), x01(kDraws);
  for (int i = 0; i < kDraws; ++i) {
    const Matrix w = sample_wishart(shape, rate, rng);
    REQUIRE((w - w.transpose()).norm() == 0.0);
    REQUIRE(Eigen::LLT<Matrix>(w).info() == Eigen::Success);
    x00[i] = w(0, 0);
    x01[i] = w(0, 1);
  }
  const auto m00 = moments(x00);
  const auto m01 = moments(x01);
  CHECK(within_se(m00.mean, shape, m00.se_mean));
  CHECK(within_se(m01.mean, 0.0, m01.se_mean));
  // As a degrees-of-freedom Wishart, df = 2a and V = (2B)^-1, so
  // Var(X_jj) = 2 df V_jj^2.
  const double df = 2.0 * shape, v = 0.5;
  CHECK(within_se(m00.var, 2.0 * df * v * v, m00.se_var));
  CHECK_THROWS_AS(sample_wishart(0.4, rate, rng), InvalidShape);
}

TEST_CASE("wishart agrees with a sum of Gaussian outer products") {
  // Integer df: X = sum_{t<df} z z^T, z ~ N(0, (2B)^-1).
  Rng rng({7, 0});
  const Matrix rate = mat2(2.0, 0.5, 0.5, 1.0);
  const double shape = 3.0;
  const Matrix scale = (2.0 * rate).inverse();
  const int n = 50000;
  std::vector<double> bart(n), direct(n);
  for (int i = 0; i < n; ++i) {
    bart[i] = sample_wishart(shape, rate, rng)(1, 0);
    Matrix s = Matrix::Zero(2, 2);
    for (int t = 0; t < 6; ++t) {
      const Vector z = sample_mvn(Vector::Zero(2), scale, rng);
      s += z * z.transpose();
    }
    direct[i] = s(1, 0);
  }
  const auto a = moments(bart), b = moments(direct);
  const double se = std::hypot(a.se_mean, b.se_mean);
  CHECK(within_se(a.mean, b.mean, se));
  CHECK(within_se(a.var, b.var, std::hypot(a.se_var, b.se_var)));
  CHECK(a.mean == doctest::Approx(shape * rate.inverse()(1, 0)).epsilon(0.03));
}

TEST_CASE("gig mean against quadrature") {
  Rng rng({8, 0});
  struct Case {
    double p, a, b;
  };
  for (const Case c : {Case{-0.5, 4, 9}, Case{8, 20, 0.3}, Case{0.2, 0.1, 0.05},
                       Case{-3, 2, 7}, Case{1.5, 0.01, 5}}) {
    std::vector<double> x(kDraws);
    for (auto& v : x) v = sample_gig(c.p, c.a, c.b, rng);
    const auto m = moments(x);
    INFO("p=" << c.p << " a=" << c.a << " b=" << c.b);
    CHECK(within_se(m.mean, gig_mean_quadrature(c.p, c.a, c.b), m.se_mean));
  }
  std::vector<double> x(kDraws);
  for (auto& v : x) v = sample_gig(-0.5, 4, 9, rng);
  CHECK(moments(x).mean == doctest::Approx(1.5).epsilon(0.03));
}

TEST_CASE("gig reciprocal symmetry") {
  Rng rng({9, 0});
  const double p = 1.3, a = 2.0, b = 0.7;
  std::vector<double> x(kDraws), y(kDraws);
  for (auto& v : x) v = sample_gig(p, a, b, rng);
  for (auto& v : y) v = 1.0 / sample_gig(-p, b, a, rng);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto i = static_cast<std::size_t>(q * kDraws);
    // quantile SE is roughly sqrt(q(1-q)/n) / f(x_q); compare on the probability scale instead
    const double xq = x[i];
    const double frac_y = static_cast<double>(std::lower_bound(y.begin(), y.end(), xq) - y.begin()) / kDraws;
    CHECK(std::abs(frac_y - q) < 5.0 * std::sqrt(2.0 * q * (1 - q) / kDraws));
  }
}

TEST_CASE("gig approaches the gamma limit as b vanishes") {
  Rng rng({10, 0});
  std::vector<double> x(kDraws);
  for (auto& v : x) v = sample_gig(8.0, 20.0, 1e-9, rng);
  CHECK(moments(x).mean == doctest::Approx(0.8).epsilon(0.03));
  CHECK_THROWS_AS(sample_gig(1.0, 0.0, 1.0, rng), InvalidParams);
  CHECK_THROWS_AS(sample_gig(1.0, 1.0, -1.0, rng), InvalidParams);
}

TEST_CASE("categorical from log weights") {
  Rng rng({11, 0});
  const double ninf = -std::numeric_limits<double>::infinity();
  const double lw[3] = {std::log(0.2), ninf, std::log(0.8)};
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < kDraws; ++i) ++counts[sample_categorical_log(lw, 3, rng)];
  CHECK(counts[1] == 0);
  const double se = std::sqrt(0.2 * 0.8 / kDraws);
  CHECK(std::abs(counts[0] / static_cast<double>(kDraws) - 0.2) < 5 * se);
  const double all_inf[2] = {ninf, ninf};
  CHECK(sample_categorical_log(all_inf, 2, rng) == -1);
  // very negative but finite terms still normalize
  const double tiny[2] = {-2000.0, -2000.0 + std::log(3.0)};
  int second = 0;
  for (int i = 0; i < 10000; ++i) second += sample_categorical_log(tiny, 2, rng);
  CHECK(std::abs(second / 10000.0 - 0.75) < 5 * std::sqrt(0.75 * 0.25 / 10000));
}
