#pragma once

#include <optional>
#include <vector>

#include "groupcover/eb_normal.hpp"
#include "groupcover/numerics.hpp"
#include "groupcover/types.hpp"

namespace groupcover {

// Miscoverage budget alpha split between the posterior-quantile level
// (alpha1) and the confidence bound on that quantile (alpha - alpha1).
// alpha1 == alpha is the degenerate split with no bootstrap margin.
struct BudgetSplit {
  double alpha = 0.05;
  double alpha1 = 0.025;

  void validate() const;
};

struct BootstrapConfig {
  long replicates = 200;
  Estimator estimator = Estimator::mom;
  RngStream rng;
  // When set, hyperparameters are held at these values and never
  // re-estimated, removing all estimation uncertainty from the bound.
  std::optional<HyperParams> forced_hyper;

  void validate() const;
};

// Posterior upper alpha1-quantile v(z): Pr(mu > v(z) | Z = z) = alpha1 under
// the given model. Requires tau2 > 0.
double posterior_upper_quantile(double z, const NormalModelSpec& spec, double alpha1);

// Upper confidence bound u(z) for v(z) at level 1 - (alpha - alpha1), by
// parametric-bootstrap percentile: refit the linking model on datasets
// simulated from the fitted model, recompute v(z) under each refit, and take
// the conservative upper order statistic. sigma2 is the sampling variance of
// the target group's Z.
double bootstrap_upper_bound(double z, double sigma2, const std::vector<GroupSummary>& summaries,
                             const BudgetSplit& split, const BootstrapConfig& cfg);

// The composed one-sided bound: Pr(mu > u(Z)) <= alpha1 + (alpha - alpha1) = alpha
// marginally over the hierarchical draw.
double one_sided_upper(double z, double sigma2, const std::vector<GroupSummary>& summaries,
                       const BudgetSplit& split, const BootstrapConfig& cfg);

// Two-sided interval with per-side budget alpha/2, split between the
// posterior quantile share alpha1_side (default alpha/4) and the bootstrap
// share. Both sides reuse the same bootstrap replicates.
Interval two_sided_interval(double z, double sigma2, const std::vector<GroupSummary>& summaries,
                            double alpha, const BootstrapConfig& cfg, double alpha1_side = -1.0);

}  // namespace groupcover
