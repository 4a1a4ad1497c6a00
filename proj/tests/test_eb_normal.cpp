#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "groupcover/direct_intervals.hpp"
#include "groupcover/eb_normal.hpp"
#include "oracles.hpp"

using namespace groupcover;

namespace {

NormalModelSpec unit_spec() { return NormalModelSpec{HyperParams{0.0, 1.0}, 1.0}; }

}  // namespace

TEST_CASE("posterior combines prior and data by precision") {
  const Posterior p = posterior(2.0, unit_spec());
  CHECK(p.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.sd == doctest::Approx(0.7071067811865475).epsilon(1e-14));

  // Flat-prior limit.
  const Posterior flat = posterior(2.0, NormalModelSpec{HyperParams{0.0, 1e12}, 1.0});
  CHECK(flat.mean == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(flat.sd == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(posterior(std::numeric_limits<double>::infinity(), unit_spec()), DomainError);
}

TEST_CASE("posterior matches a numerical Bayes rule on a fine grid") {
  const NormalModelSpec spec{HyperParams{0.0, 0.25}, 1.0};
  const Posterior p = posterior(3.0, spec);
  CHECK(p.mean == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(p.sd == doctest::Approx(0.4472135954999579).epsilon(1e-12));

  // Quadrature oracle: moments of the unnormalized posterior density.
  auto unnorm = [&](double mu) {
    const double a = (3.0 - mu) / 1.0;
    const double b = mu / 0.5;
    return std::exp(-0.5 * a * a) * std::exp(-0.5 * b * b);
  };
  const double z0 = oracle::simpson([&](double mu) { return unnorm(mu); }, -6, 6, 20000);
  const double m1 = oracle::simpson([&](double mu) { return mu * unnorm(mu); }, -6, 6, 20000);
  const double m2 =
      oracle::simpson([&](double mu) { return mu * mu * unnorm(mu); }, -6, 6, 20000);
  const double mean = m1 / z0;
  const double sd = std::sqrt(m2 / z0 - mean * mean);
  CHECK(p.mean == doctest::Approx(mean).epsilon(1e-8));
  CHECK(p.sd == doctest::Approx(sd).epsilon(1e-7));
}

TEST_CASE("posterior collapses onto phi when tau2 = 0") {
  const Posterior p = posterior(5.0, NormalModelSpec{HyperParams{1.5, 0.0}, 4.0});
  CHECK(p.mean == 1.5);
  CHECK(p.sd == doctest::Approx(2e-8).epsilon(1e-12));
}

TEST_CASE("eb_interval examples") {
  const Interval at0 = eb_interval(0.0, unit_spec(), 0.05);
  CHECK(at0.lower == doctest::Approx(-1.3859038243496778).epsilon(1e-10));
  CHECK(at0.upper == doctest::Approx(1.3859038243496778).epsilon(1e-10));
  CHECK(at0.method == Method::eb);
  CHECK(at0.level == doctest::Approx(0.95));

  const Interval at2 = eb_interval(2.0, unit_spec(), 0.05);
  CHECK(at2.lower == doctest::Approx(-0.3859038243496778).epsilon(1e-10));
  CHECK(at2.upper == doctest::Approx(2.3859038243496778).epsilon(1e-10));

  // Flat-prior limit agrees with the direct z-interval.
  const Interval flat = eb_interval(1.0, NormalModelSpec{HyperParams{0.0, 1e12}, 1.0}, 0.05);
  const Interval direct = umau_z(1.0, 1.0, 0.05);
  CHECK(flat.lower == doctest::Approx(direct.lower).epsilon(1e-5));
  CHECK(flat.upper == doctest::Approx(direct.upper).epsilon(1e-5));
}

TEST_CASE("eb_interval endpoints match Monte Carlo posterior quantiles") {
  const Interval iv = eb_interval(0.0, unit_spec(), 0.05);
  const Posterior p = posterior(0.0, unit_spec());
  RngStream rng(2024, 0);
  const int n = 400000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = rng.normal(p.mean, p.sd);
  std::sort(draws.begin(), draws.end());
  const double lo_emp = draws[static_cast<std::size_t>(0.025 * n)];
  const double hi_emp = draws[static_cast<std::size_t>(0.975 * n)];
  CHECK(std::fabs(lo_emp - iv.lower) < 0.01);
  CHECK(std::fabs(hi_emp - iv.upper) < 0.01);
}

TEST_CASE("eb_interval width does not depend on z") {
  const double w0 = eb_interval(0.0, unit_spec(), 0.05).width();
  for (double z : {-4.0, -1.0, 0.3, 2.0, 7.5}) {
    CHECK(eb_interval(z, unit_spec(), 0.05).width() == doctest::Approx(w0).epsilon(1e-13));
  }
}

TEST_CASE("exact_eb_coverage frozen values and Monte Carlo oracle") {
  // Closed-form values frozen from a high-precision evaluation.
  CHECK(exact_eb_coverage(0.0, unit_spec(), 0.05) ==
        doctest::Approx(0.994425403319).epsilon(1e-9));
  CHECK(exact_eb_coverage(2.0, unit_spec(), 0.05) ==
        doctest::Approx(0.779884906639).epsilon(1e-9));
  CHECK(exact_eb_coverage(4.0, unit_spec(), 0.05) ==
        doctest::Approx(0.109687384637).epsilon(1e-9));

  // Independent Monte Carlo check at mu = 2.
  RngStream rng(77, 0);
  const long reps = 1000000;
  long cover = 0;
  for (long r = 0; r < reps; ++r) {
    const double z = rng.normal(2.0, 1.0);
    const Interval iv = eb_interval(z, unit_spec(), 0.05);
    if (iv.contains(2.0)) ++cover;
  }
  const double p_hat = static_cast<double>(cover) / reps;
  const double se = std::sqrt(p_hat * (1 - p_hat) / reps);
  CHECK(std::fabs(p_hat - 0.779884906639) <= 3.5 * se);

  CHECK_THROWS_AS(exact_eb_coverage(0.0, NormalModelSpec{HyperParams{0.0, 0.0}, 1.0}, 0.05),
                  DomainError);
}

TEST_CASE("coverage curve symmetry, tails, and CSV form") {
  const auto single = coverage_curve(unit_spec(), 0.05, {0.0});
  REQUIRE(single.size() == 1);
  CHECK(single[0].second == doctest::Approx(0.994425403319).epsilon(1e-9));

  for (double d : {0.5, 1.0, 2.5, 4.0, 8.0, 12.0}) {
    const double up = exact_eb_coverage(d, unit_spec(), 0.05);
    const double down = exact_eb_coverage(-d, unit_spec(), 0.05);
    CHECK(up == down);  // exact mirror, even deep in the tails
    CHECK(up > 0.0);
  }
  // Strictly decreasing in |mu - phi| for the sigma2 = tau2 case.
  double prev = exact_eb_coverage(0.0, unit_spec(), 0.05);
  for (double d = 0.25; d <= 6.0; d += 0.25) {
    const double cur = exact_eb_coverage(d, unit_spec(), 0.05);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(exact_eb_coverage(6.0, unit_spec(), 0.05) < 0.01);
  CHECK(exact_eb_coverage(-6.0, unit_spec(), 0.05) < 0.01);

  std::ostringstream os;
  write_coverage_curve_csv(os, coverage_curve(unit_spec(), 0.05, {0.0, 2.0}));
  CHECK(os.str() == "mu,coverage\n0,0.994425403\n2,0.779884907\n");
}

TEST_CASE("prior predictive CDF is the convolved normal") {
  CHECK(prior_predictive_cdf(0.0, unit_spec()) == doctest::Approx(0.5).epsilon(1e-14));
  const double at2 = prior_predictive_cdf(2.0, unit_spec());
  CHECK(at2 == doctest::Approx(0.9213503964748575).epsilon(1e-10));

  // Convolution oracle: integrate the conditional CDF against the prior.
  const double quad = oracle::simpson(
      [&](double mu) {
        return oracle::norm_cdf(2.0 - mu) * std::exp(-0.5 * mu * mu) / std::sqrt(2 * M_PI);
      },
      -10, 10, 20000);
  CHECK(at2 == doctest::Approx(quad).epsilon(1e-9));

  // Degenerate prior reduces to the sampling CDF.
  const double degen = prior_predictive_cdf(1.3, NormalModelSpec{HyperParams{0.5, 0.0}, 4.0});
  CHECK(degen == doctest::Approx(oracle::norm_cdf((1.3 - 0.5) / 2.0)).epsilon(1e-12));
}

TEST_CASE("posterior mean is a convex combination of z and phi") {
  const NormalModelSpec spec{HyperParams{1.2, 0.7}, 2.3};
  const double w = (1.0 / spec.sigma2) / (1.0 / spec.hyper.tau2 + 1.0 / spec.sigma2);
  for (double z : {-3.0, 0.0, 1.2, 5.5}) {
    const Posterior p = posterior(z, spec);
    CHECK(p.mean == doctest::Approx(w * z + (1.0 - w) * spec.hyper.phi).epsilon(1e-12));
  }
  CHECK(w >= 0.0);
  CHECK(w <= 1.0);
}

TEST_CASE("mc_bayes_risk estimates and orders the classic risks") {
  RngStream rng(5150, 0);
  const auto post_risk = mc_bayes_risk(
      [](double z) { return posterior(z, unit_spec()).mean; }, unit_spec(), 200000, rng);
  CHECK(std::fabs(post_risk.value - 0.5) <= 3.0 * post_risk.se);

  RngStream rng2(5150, 0);
  const auto id_risk =
      mc_bayes_risk([](double z) { return z; }, unit_spec(), 200000, rng2);
  CHECK(std::fabs(id_risk.value - 1.0) <= 3.0 * id_risk.se);

  // Same seed: the shrinkage estimator wins rep for rep.
  CHECK(post_risk.value < id_risk.value);

  RngStream rng3(5150, 0);
  CHECK_THROWS_AS(mc_bayes_risk([](double) { return 1.0; }, unit_spec(), 50, rng3), DomainError);
  RngStream rng4(5150, 0);
  CHECK_THROWS_AS(mc_bayes_risk([](double) { return std::numeric_limits<double>::quiet_NaN(); },
                                unit_spec(), 100, rng4),
                  EvalError);
}
