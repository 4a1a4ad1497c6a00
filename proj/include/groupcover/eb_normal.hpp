#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "groupcover/numerics.hpp"
#include "groupcover/types.hpp"

namespace groupcover {

// Normal-normal model for a single group: mu ~ N(phi, tau2), Z|mu ~ N(mu, sigma2).
struct NormalModelSpec {
  HyperParams hyper;
  double sigma2 = 1.0;

  void validate() const;
};

struct Posterior {
  double mean = 0.0;
  double sd = 1.0;
};

// Conjugate posterior of mu given Z = z. A degenerate prior (tau2 = 0)
// collapses onto phi; the sd is floored at 1e-8 * sigma so that downstream
// intervals stay well defined.
Posterior posterior(double z, const NormalModelSpec& spec);

// Central posterior interval: mean +/- z_{1-alpha/2} * posterior sd.
Interval eb_interval(double z, const NormalModelSpec& spec, double alpha);

// Frequentist coverage of eb_interval at a fixed true mean, in closed form.
// Requires tau2 > 0.
double exact_eb_coverage(double mu, const NormalModelSpec& spec, double alpha);

std::vector<std::pair<double, double>> coverage_curve(const NormalModelSpec& spec, double alpha,
                                                      const std::vector<double>& mu_grid);

// CSV with header `mu,coverage`, one row per grid point, 9 significant digits.
void write_coverage_curve_csv(std::ostream& out,
                              const std::vector<std::pair<double, double>>& curve);

// Marginal (prior predictive) CDF of Z: N(phi, tau2 + sigma2).
double prior_predictive_cdf(double z, const NormalModelSpec& spec);

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

// Monte Carlo squared-error Bayes risk of an estimator z -> mu-hat under the
// model: draws (mu, Z) pairs and averages (mu - estimator(Z))^2.
McEstimate mc_bayes_risk(const std::function<double(double)>& estimator,
                         const NormalModelSpec& spec, long reps, RngStream& rng);

}  // namespace groupcover
