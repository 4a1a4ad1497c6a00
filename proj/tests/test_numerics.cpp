#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "groupcover/numerics.hpp"
#include "oracles.hpp"

using namespace groupcover;

namespace {

std::vector<double> probability_grid() {
  std::vector<double> ps;
  for (double p : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
    ps.push_back(p);
    ps.push_back(1.0 - p);
  }
  for (double p = 0.05; p < 0.999; p += 0.05) ps.push_back(p);
  return ps;
}

}  // namespace

TEST_CASE("norm_cdf matches the reference erfc") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  // Frozen from the series/continued-fraction oracle.
  CHECK(norm_cdf(1.959964) == doctest::Approx(oracle::norm_cdf(1.959964)).epsilon(1e-12));
  CHECK(std::fabs(norm_cdf(1.959964) - 0.975) < 1e-7);
  const double tail = norm_cdf(-8.0);
  CHECK(tail == doctest::Approx(6.220960574271784e-16).epsilon(1e-6));
  CHECK(tail == doctest::Approx(oracle::norm_cdf(-8.0)).epsilon(1e-6));
  CHECK_THROWS_AS(norm_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(norm_cdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("norm_quantile inverts the CDF") {
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  // 1.959963984540054 frozen from bisection on the oracle CDF.
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(norm_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(norm_quantile(0.0), DomainError);
  CHECK_THROWS_AS(norm_quantile(1.0), DomainError);
  CHECK_THROWS_AS(norm_quantile(-0.2), DomainError);
}

TEST_CASE("CDF/quantile roundtrip within 1e-12 across the probability grid") {
  for (double p : probability_grid()) {
    const double x = norm_quantile(p);
    CHECK(std::fabs(norm_cdf(x) - p) <= 1e-12);
  }
}

TEST_CASE("normal CDF symmetry and monotonicity") {
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    CHECK(std::fabs(norm_cdf(x) + norm_cdf(-x) - 1.0) <= 1e-14);
  }
  // Strict growth holds until the tail saturates in double precision (~8.3).
  double prev = norm_cdf(-8.0);
  for (double x = -7.5; x <= 8.0; x += 0.5) {
    const double cur = norm_cdf(x);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("t_cdf against the quadrature oracle") {
  CHECK(t_cdf(0.0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t_cdf(3.182446, 3.0) == doctest::Approx(oracle::t_cdf(3.182446, 3.0)).epsilon(1e-10));
  CHECK(std::fabs(t_cdf(3.182446, 3.0) - 0.975) < 1e-6);
  for (double x : {-2.0, 0.0, 2.0}) {
    CHECK(std::fabs(t_cdf(x, 1e6) - norm_cdf(x)) < 1e-4);
  }
  for (double x = -4.0; x <= 4.0; x += 0.5) {
    CHECK(std::fabs(t_cdf(x, 5.0) + t_cdf(-x, 5.0) - 1.0) <= 1e-14);
  }
  double prev = t_cdf(-8.0, 2.5);
  for (double x = -7.5; x <= 8.0; x += 0.5) {
    const double cur = t_cdf(x, 2.5);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK_THROWS_AS(t_cdf(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(t_cdf(0.0, -1.0), DomainError);
}

TEST_CASE("t_quantile inverts t_cdf") {
  CHECK(t_quantile(0.5, 7.0) == doctest::Approx(0.0).epsilon(1e-14));
  // 3.182446305284371 frozen from bisection on the t_cdf quadrature oracle.
  CHECK(t_quantile(0.975, 3.0) == doctest::Approx(3.1824463052837).epsilon(1e-9));
  CHECK(std::fabs(t_quantile(0.975, 1e6) - 1.959963984540054) < 1e-3);
  CHECK(t_quantile(0.005, 4.0) == doctest::Approx(-t_quantile(0.995, 4.0)).epsilon(1e-12));
  for (double p : {0.01, 0.2, 0.6, 0.99}) {
    const double x = t_quantile(p, 3.7);
    CHECK(std::fabs(t_cdf(x, 3.7) - p) <= 1e-10);
  }
  CHECK_THROWS_AS(t_quantile(0.0, 3.0), DomainError);
  CHECK_THROWS_AS(t_quantile(0.975, 0.0), DomainError);
}

TEST_CASE("find_root basics") {
  CHECK(find_root([](double x) { return x - 1.0; }, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double q = find_root([](double x) { return norm_cdf(x) - 0.975; }, 0.0, 10.0);
  CHECK(q == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, 0.0, 1.0), BracketError);
  // Root exactly at an endpoint is returned as is.
  CHECK(find_root([](double x) { return x; }, 0.0, 1.0) == 0.0);
}

TEST_CASE("find_root residual bound on randomized monotone functions") {
  std::mt19937_64 gen(20260809u);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double root = unif(gen);
    const double a = pos(gen);
    const double b = pos(gen);
    auto f = [&](double x) { return a * (x - root) + b * std::pow(x - root, 3.0); };
    const double lo = root - pos(gen) * 2.0;
    const double hi = root + pos(gen) * 2.0;
    const double found = find_root(f, lo, hi);
    CHECK(std::fabs(found - root) <= 1e-8 * std::max(1.0, std::fabs(root)));
  }
}

TEST_CASE("find_root reports max_iter with the best iterate") {
  ToleranceConfig tight;
  tight.abs_tol = 1e-300;
  tight.rel_tol = 1e-300;
  tight.max_iter = 5;
  try {
    find_root([](double x) { return std::cbrt(x - 0.3); }, 0.0, 1.0, tight);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::fabs(e.best_iterate() - 0.3) < 0.5);
  }
}

TEST_CASE("minimize_scalar") {
  const auto quad = minimize_scalar([](double w) { return (w - 0.5) * (w - 0.5); }, 0.0, 1.0, 33);
  CHECK(quad.argmin == doctest::Approx(0.5).epsilon(1e-8));
  const auto mono = minimize_scalar([](double w) { return w; }, 0.0, 1.0, 21);
  CHECK(mono.argmin == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(minimize_scalar([](double) { return 1.0; }, 0.0, 1.0, 2), DomainError);
  CHECK_THROWS_AS(
      minimize_scalar([](double x) { return std::log(x - 0.5); }, 0.0, 1.0, 11), EvalError);
}

TEST_CASE("tolerance config validation") {
  ToleranceConfig bad;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ToleranceConfig{};
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("rng streams replay and separate") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 10000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42, 8);
  RngStream d(42, 7);
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    if (c.next_u64() == d.next_u64()) ++same;
  }
  CHECK(same == 0);

  RngStream parent(9, 3);
  RngStream s1 = parent.split(11);
  RngStream s2 = parent.split(11);
  RngStream s3 = parent.split(12);
  CHECK(s1.next_u64() == s2.next_u64());
  CHECK(s1.next_u64() != s3.next_u64());
}

TEST_CASE("rng uniform and normal moments") {
  RngStream rng(123, 0);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(3e-3));
  CHECK(sum_sq / n == doctest::Approx(1.0 / 3.0).epsilon(5e-3));

  RngStream rng2(123, 1);
  double m = 0.0, v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng2.normal();
    m += x;
    v += x * x;
  }
  CHECK(m / n == doctest::Approx(0.0).epsilon(0.01));
  CHECK(std::fabs(v / n - 1.0) < 0.02);
}
