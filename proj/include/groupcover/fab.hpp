#pragma once

#include <vector>

#include "groupcover/types.hpp"

namespace groupcover {

// Across-group linking information for one target group, estimated without
// that group's data. scale2 is a sampling-variance proxy that enters only
// the width objective, never the coverage side.
struct LinkingModel {
  HyperParams hyper;
  double scale2 = 1.0;

  void validate() const;
};

// Asymmetric two-sided acceptance region, indexed by the tail split w. For
// any w the region has sampling probability exactly 1 - alpha under the
// candidate mean.
struct AcceptanceRegion {
  double lo = 0.0;
  double hi = 0.0;
  double w = 0.5;
};

// Tail-split clamp: w = 0 or 1 would make the region half-infinite.
inline constexpr double kFabWClamp = 1e-6;

// Optimal tail split for candidate mean mu: minimizes the prior-predictive
// probability of the acceptance region, i.e. the marginal N(phi, tau2 + scale2)
// mass between the region endpoints. Minimizing that mass pointwise over mu
// minimizes the prior expected interval width of the inverted procedure.
double fab_w(double mu, const LinkingModel& link, double sigma, double alpha);

// Region (mu + sigma * q(alpha * w), mu + sigma * q(1 - alpha * (1 - w)))
// with q the standard normal quantile.
AcceptanceRegion acceptance_region_z(double mu, double w, double sigma, double alpha);

// t-pivot analogue on the scale se = sd / sqrt(n), with dof = n - 1.
AcceptanceRegion acceptance_region_t(double mu, double w, double se, double dof, double alpha);

// Inverts the family of optimal tests: C(z) = { mu : z in region(mu, w(mu)) }.
// A 512-point scan brackets the boundary crossings, which are then polished
// by root finding; a non-contiguous accepted set is hulled with a warning.
Interval fab_interval_z(double z, double sigma, const LinkingModel& link, double alpha);

// t variant: acceptance regions use the group's own t pivot while the tail
// split is driven by the linking model alone (sigma inside the objective is
// sqrt(link.scale2), pooled from the other groups).
Interval fab_interval_t(const GroupSummary& summary, const LinkingModel& link, double alpha);

// FAB intervals for every group, each with leave-one-out linking: hyper from
// the other groups' summaries and scale2 = mean of their noise variances.
// Groups carrying a sample sd get the t variant, known-sigma groups the z
// variant.
std::vector<Interval> fab_all_groups(const std::vector<GroupSummary>& summaries, double alpha,
                                     Estimator estimator = Estimator::mom);

}  // namespace groupcover
