#include "groupcover/eb_normal.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace groupcover {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0,1), got " << alpha;
    throw DomainError(msg.str());
  }
}

}  // namespace

void NormalModelSpec::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("NormalModelSpec: sigma2 must be positive and finite");
  }
  if (!(hyper.tau2 >= 0.0) || !std::isfinite(hyper.tau2) || !std::isfinite(hyper.phi)) {
    throw DomainError("NormalModelSpec: hyperparameters must be finite with tau2 >= 0");
  }
}

Posterior posterior(double z, const NormalModelSpec& spec) {
  spec.validate();
  if (!std::isfinite(z)) throw DomainError("posterior: z must be finite");
  if (spec.hyper.tau2 <= 0.0) {
    return Posterior{spec.hyper.phi, 1e-8 * std::sqrt(spec.sigma2)};
  }
  const double precision = 1.0 / spec.hyper.tau2 + 1.0 / spec.sigma2;
  const double mean = (spec.hyper.phi / spec.hyper.tau2 + z / spec.sigma2) / precision;
  return Posterior{mean, 1.0 / std::sqrt(precision)};
}

Interval eb_interval(double z, const NormalModelSpec& spec, double alpha) {
  check_alpha(alpha);
  const Posterior post = posterior(z, spec);
  const double q = norm_quantile(1.0 - alpha / 2.0);
  return Interval{post.mean - q * post.sd, post.mean + q * post.sd, 1.0 - alpha, Method::eb};
}

double exact_eb_coverage(double mu, const NormalModelSpec& spec, double alpha) {
  spec.validate();
  check_alpha(alpha);
  if (!std::isfinite(mu)) throw DomainError("exact_eb_coverage: mu must be finite");
  if (!(spec.hyper.tau2 > 0.0)) {
    throw DomainError("exact_eb_coverage: degenerate prior (tau2 = 0) has no coverage curve");
  }
  const double tau2 = spec.hyper.tau2;
  const double sigma2 = spec.sigma2;
  const double phi = spec.hyper.phi;
  const double w = (1.0 / sigma2) / (1.0 / tau2 + 1.0 / sigma2);
  const double s = 1.0 / std::sqrt(1.0 / tau2 + 1.0 / sigma2);
  const double q = norm_quantile(1.0 - alpha / 2.0);
  // The interval covers mu exactly when Z lands so that the posterior mean
  // stays within q*s of mu.
  const double z_lo = (mu - (1.0 - w) * phi - q * s) / w;
  const double z_hi = (mu - (1.0 - w) * phi + q * s) / w;
  const double sigma = std::sqrt(sigma2);
  const double a = (z_lo - mu) / sigma;
  const double b = (z_hi - mu) / sigma;
  // Difference taken on the tail side where the CDF keeps relative accuracy,
  // which also keeps the curve exactly symmetric about phi.
  if (a + b > 0.0) return norm_cdf(-a) - norm_cdf(-b);
  return norm_cdf(b) - norm_cdf(a);
}

std::vector<std::pair<double, double>> coverage_curve(const NormalModelSpec& spec, double alpha,
                                                      const std::vector<double>& mu_grid) {
  if (mu_grid.empty()) throw DomainError("coverage_curve: empty mu grid");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(mu_grid.size());
  for (double mu : mu_grid) curve.emplace_back(mu, exact_eb_coverage(mu, spec, alpha));
  return curve;
}

void write_coverage_curve_csv(std::ostream& out,
                              const std::vector<std::pair<double, double>>& curve) {
  out << "mu,coverage\n";
  char buf[64];
  for (const auto& [mu, cov] : curve) {
    std::snprintf(buf, sizeof(buf), "%.9g", mu);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", cov);
    out << buf << '\n';
  }
}

double prior_predictive_cdf(double z, const NormalModelSpec& spec) {
  spec.validate();
  if (!std::isfinite(z)) throw DomainError("prior_predictive_cdf: z must be finite");
  const double sd = std::sqrt(spec.hyper.tau2 + spec.sigma2);
  return norm_cdf((z - spec.hyper.phi) / sd);
}

McEstimate mc_bayes_risk(const std::function<double(double)>& estimator,
                         const NormalModelSpec& spec, long reps, RngStream& rng) {
  spec.validate();
  if (reps < 100) throw DomainError("mc_bayes_risk: reps must be >= 100");
  const double tau = std::sqrt(spec.hyper.tau2);
  const double sigma = std::sqrt(spec.sigma2);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long r = 0; r < reps; ++r) {
    const double mu = rng.normal(spec.hyper.phi, tau);
    const double z = rng.normal(mu, sigma);
    const double est = estimator(z);
    if (!std::isfinite(est)) {
      std::ostringstream msg;
      msg << "mc_bayes_risk: estimator returned a non-finite value at z = " << z;
      throw EvalError(msg.str());
    }
    const double loss = (mu - est) * (mu - est);
    sum += loss;
    sum_sq += loss * loss;
  }
  const double n = static_cast<double>(reps);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean) * n / (n - 1.0);
  return McEstimate{mean, std::sqrt(var / n)};
}

}  // namespace groupcover
