#include "groupcover/fab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "groupcover/grouped_data.hpp"
#include "groupcover/numerics.hpp"

namespace groupcover {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0,1), got " << alpha;
    throw DomainError(msg.str());
  }
}

void check_w(double w) {
  if (!(w >= kFabWClamp && w <= 1.0 - kFabWClamp)) {
    std::ostringstream msg;
    msg << "w must lie in [" << kFabWClamp << ", " << 1.0 - kFabWClamp << "], got " << w;
    throw DomainError(msg.str());
  }
}

// log of the standard normal upper tail, accurate for any finite x. The
// plain erfc path underflows past ~38 sigma; the asymptotic expansion keeps
// the objective discriminating arbitrarily far out.
double log_norm_sf(double x) {
  if (x < 8.0) return std::log(0.5 * std::erfc(x * 0.7071067811865475244));
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - 0.9189385332046727418 - std::log(x) + std::log(series);
}

// log( Phi(b) - Phi(a) ) for a < b, stable in both tails. Upper side uses
// Phi_c(a) - Phi_c(b), lower side Phi(b) - Phi(a) with Phi(x) = Phi_c(-x).
double log_norm_mass(double a, double b) {
  if (a + b > 0.0) {
    const double big = log_norm_sf(a);
    const double small = log_norm_sf(b);
    return big + std::log1p(-std::exp(small - big));
  }
  const double big = log_norm_sf(-b);
  const double small = log_norm_sf(-a);
  return big + std::log1p(-std::exp(small - big));
}

// Inverts a family of acceptance regions over candidate means. region(mu)
// must already bake in the optimal tail split for mu. quantile_bound is the
// largest |pivot quantile| any clamped split can produce; no accepted mu can
// sit further than se * quantile_bound from z.
Interval invert_acceptance(double z, double se, const LinkingModel& link, double alpha,
                           const std::function<AcceptanceRegion(double)>& region,
                           double quantile_bound, Method method) {
  constexpr int kScanPoints = 512;

  const double tau2 = std::max(link.hyper.tau2, 0.0);
  const double phi = link.hyper.phi;
  const double span = 12.0 * std::sqrt(se * se + tau2 + std::fabs(phi - z) * se);
  const double marginal_sd = std::sqrt(tau2 + link.scale2);
  const double reach = quantile_bound * se;
  // Window: the scan span, widened to cover the linking center (where the
  // tail split transitions), clipped to what the clamped splits can reach.
  double lo = std::max(std::min({z - span, phi - 12.0 * marginal_sd, z - 4.0 * se}), z - reach);
  double hi = std::min(std::max({z + span, phi + 12.0 * marginal_sd, z + 4.0 * se}), z + reach);
  if (!(lo < hi)) {
    lo = z - 4.0 * se;
    hi = z + 4.0 * se;
  }

  std::vector<double> grid;
  grid.reserve(kScanPoints + 1);
  const double step = (hi - lo) / (kScanPoints - 1);
  for (int i = 0; i < kScanPoints; ++i) grid.push_back(lo + i * step);
  // z always belongs to its own acceptance region for mu near z; pinning it
  // into the grid keeps the accepted set nonempty.
  grid.push_back(z);
  std::sort(grid.begin(), grid.end());

  std::vector<char> accepted(grid.size());
  std::vector<AcceptanceRegion> regions(grid.size());
  int first = -1, last = -1;
  int runs = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    regions[i] = region(grid[i]);
    accepted[i] = (regions[i].lo <= z && z <= regions[i].hi) ? 1 : 0;
    if (accepted[i]) {
      if (first < 0) first = static_cast<int>(i);
      last = static_cast<int>(i);
      if (i == 0 || !accepted[i - 1]) ++runs;
    }
  }
  if (first < 0) {
    std::ostringstream msg;
    msg << "acceptance scan found no candidate mean for z = " << z;
    throw InversionError(msg.str());
  }
  if (runs > 1) {
    std::ostringstream msg;
    msg << "acceptance set for z = " << z << " is non-contiguous (" << runs
        << " runs); taking the convex hull";
    warn(msg.str());
  }

  // Lower endpoint: z leaves through the region's upper edge below the hull.
  double lower = grid[first];
  if (first > 0) {
    const double a = grid[first - 1];
    const double b = grid[first];
    auto h_hi = [&](double mu) { return z - region(mu).hi; };
    if (h_hi(a) > 0.0 && h_hi(b) <= 0.0) {
      lower = find_root(h_hi, a, b);
    }
  }
  // Upper endpoint: z leaves through the region's lower edge above the hull.
  double upper = grid[last];
  if (last + 1 < static_cast<int>(grid.size())) {
    const double a = grid[last];
    const double b = grid[last + 1];
    auto h_lo = [&](double mu) { return z - region(mu).lo; };
    if (h_lo(a) >= 0.0 && h_lo(b) < 0.0) {
      upper = find_root(h_lo, a, b);
    }
  }
  return Interval{lower, upper, 1.0 - alpha, method};
}

double pooled_loo_scale2(const std::vector<GroupSummary>& summaries, std::size_t index) {
  double acc = 0.0;
  long count = 0;
  for (std::size_t j = 0; j < summaries.size(); ++j) {
    if (j == index) continue;
    acc += summaries[j].noise_variance();
    ++count;
  }
  if (count == 0) throw DataError("no other groups available for linking");
  return acc / static_cast<double>(count);
}

}  // namespace

void LinkingModel::validate() const {
  if (!(scale2 > 0.0) || !std::isfinite(scale2)) {
    throw DomainError("LinkingModel: scale2 must be positive and finite");
  }
  if (!std::isfinite(hyper.phi) || !std::isfinite(hyper.tau2) || hyper.tau2 < 0.0) {
    throw DomainError("LinkingModel: hyperparameters must be finite with tau2 >= 0");
  }
}

double fab_w(double mu, const LinkingModel& link, double sigma, double alpha) {
  link.validate();
  check_alpha(alpha);
  if (!std::isfinite(mu)) throw DomainError("fab_w: mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("fab_w: sigma must be positive");

  // Degenerate linking variance is floored inside the objective only; the
  // coverage side never sees it.
  const double tau2 = std::max(link.hyper.tau2, 1e-8 * link.scale2);
  const double marginal_sd = std::sqrt(tau2 + link.scale2);
  const double phi = link.hyper.phi;
  // The marginal mass of the region is minimized in log space so the
  // objective stays informative when the whole region sits far in a tail.
  auto objective = [&](double w) {
    const double hi = mu + sigma * norm_quantile(1.0 - alpha * (1.0 - w));
    const double lo = mu + sigma * norm_quantile(alpha * w);
    return log_norm_mass((lo - phi) / marginal_sd, (hi - phi) / marginal_sd);
  };
  ToleranceConfig tol;
  tol.abs_tol = 1e-10;
  return minimize_scalar(objective, kFabWClamp, 1.0 - kFabWClamp, 41, tol).argmin;
}

AcceptanceRegion acceptance_region_z(double mu, double w, double sigma, double alpha) {
  check_alpha(alpha);
  check_w(w);
  if (!std::isfinite(mu)) throw DomainError("acceptance_region_z: mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("acceptance_region_z: sigma must be positive");
  }
  return AcceptanceRegion{mu + sigma * norm_quantile(alpha * w),
                          mu + sigma * norm_quantile(1.0 - alpha * (1.0 - w)), w};
}

AcceptanceRegion acceptance_region_t(double mu, double w, double se, double dof, double alpha) {
  check_alpha(alpha);
  check_w(w);
  if (!std::isfinite(mu)) throw DomainError("acceptance_region_t: mu must be finite");
  if (!(se > 0.0) || !std::isfinite(se)) throw DomainError("acceptance_region_t: se must be positive");
  return AcceptanceRegion{mu + se * t_quantile(alpha * w, dof),
                          mu + se * t_quantile(1.0 - alpha * (1.0 - w), dof), w};
}

Interval fab_interval_z(double z, double sigma, const LinkingModel& link, double alpha) {
  link.validate();
  check_alpha(alpha);
  if (!std::isfinite(z)) throw DomainError("fab_interval_z: z must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("fab_interval_z: sigma must be positive");
  }
  auto region = [&](double mu) {
    return acceptance_region_z(mu, fab_w(mu, link, sigma, alpha), sigma, alpha);
  };
  const double quantile_bound = -norm_quantile(alpha * kFabWClamp);
  return invert_acceptance(z, sigma, link, alpha, region, quantile_bound, Method::fab_z);
}

Interval fab_interval_t(const GroupSummary& summary, const LinkingModel& link, double alpha) {
  link.validate();
  check_alpha(alpha);
  if (summary.n < 2) {
    std::ostringstream msg;
    msg << "fab_interval_t: group " << summary.id << " has n = " << summary.n
        << ", need at least 2";
    throw DataError(msg.str());
  }
  if (!summary.sd || !(*summary.sd > 0.0)) {
    throw DataError("fab_interval_t: group " + summary.id + " needs a positive sample sd");
  }
  const double se = *summary.sd / std::sqrt(static_cast<double>(summary.n));
  const double dof = static_cast<double>(summary.n - 1);
  const double sigma_w = std::sqrt(link.scale2);
  auto region = [&](double mu) {
    return acceptance_region_t(mu, fab_w(mu, link, sigma_w, alpha), se, dof, alpha);
  };
  const double quantile_bound = -t_quantile(alpha * kFabWClamp, dof);
  return invert_acceptance(summary.mean, se, link, alpha, region, quantile_bound, Method::fab_t);
}

std::vector<Interval> fab_all_groups(const std::vector<GroupSummary>& summaries, double alpha,
                                     Estimator estimator) {
  check_alpha(alpha);
  if (summaries.size() < 3) throw DataError("fab_all_groups: need at least 3 groups");
  std::vector<Interval> out;
  out.reserve(summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const LinkingModel link{loo_hyperparams(summaries, i, estimator),
                            pooled_loo_scale2(summaries, i)};
    const auto& s = summaries[i];
    if (s.sd && s.n >= 2) {
      out.push_back(fab_interval_t(s, link, alpha));
    } else if (s.known_sigma) {
      const double sigma = *s.known_sigma / std::sqrt(static_cast<double>(s.n));
      out.push_back(fab_interval_z(s.mean, sigma, link, alpha));
    } else {
      throw DataError("fab_all_groups: group " + s.id + " has neither sd nor known_sigma");
    }
  }
  return out;
}

}  // namespace groupcover
