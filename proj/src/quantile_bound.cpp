#include "groupcover/quantile_bound.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "groupcover/grouped_data.hpp"

namespace groupcover {

namespace {

// Posterior quantile with a silent floor on degenerate tau2, for use inside
// the bootstrap where refits may truncate to zero.
double quantile_floored(double z, double sigma2, const HyperParams& hyper, double alpha1,
                        bool upper) {
  const Posterior post = posterior(z, NormalModelSpec{hyper, sigma2});
  const double q = norm_quantile(1.0 - alpha1);
  return upper ? post.mean + post.sd * q : post.mean - post.sd * q;
}

struct BootstrapDraws {
  std::vector<double> upper;  // v*(z), ascending
  std::vector<double> lower;  // lower-quantile analogue, ascending
};

// Simulates full datasets from the fitted model, refits, and records the
// posterior quantiles of interest under each refit.
BootstrapDraws run_bootstrap(double z, double sigma2, const std::vector<GroupSummary>& summaries,
                             double alpha1, const BootstrapConfig& cfg, const HyperParams& fit) {
  const std::size_t k = summaries.size();
  std::vector<double> vs(k);
  for (std::size_t j = 0; j < k; ++j) vs[j] = summaries[j].noise_variance();

  BootstrapDraws draws;
  draws.upper.reserve(cfg.replicates);
  draws.lower.reserve(cfg.replicates);
  const double tau = std::sqrt(std::max(fit.tau2, 0.0));
  long degenerate = 0;

  std::vector<GroupSummary> sim(k);
  for (std::size_t j = 0; j < k; ++j) {
    sim[j].id = summaries[j].id;
    sim[j].n = 1;
    sim[j].known_sigma = std::sqrt(vs[j]);
  }

  for (long b = 0; b < cfg.replicates; ++b) {
    HyperParams refit = fit;
    if (!cfg.forced_hyper) {
      RngStream rng = cfg.rng.split(static_cast<std::uint64_t>(b));
      for (std::size_t j = 0; j < k; ++j) {
        const double mu_star = rng.normal(fit.phi, tau);
        sim[j].mean = rng.normal(mu_star, std::sqrt(vs[j]));
      }
      refit = estimate(sim, cfg.estimator);
      if (refit.tau2 <= 0.0) ++degenerate;
    }
    draws.upper.push_back(quantile_floored(z, sigma2, refit, alpha1, true));
    draws.lower.push_back(quantile_floored(z, sigma2, refit, alpha1, false));
  }
  if (!cfg.forced_hyper && degenerate == cfg.replicates) {
    warn("bootstrap_upper_bound: every replicate refit truncated tau2 to zero; "
         "bound computed with floored posterior sd");
  }
  std::sort(draws.upper.begin(), draws.upper.end());
  std::sort(draws.lower.begin(), draws.lower.end());
  return draws;
}

// Conservative upper order statistic at level 1 - gamma (1-indexed rank
// ceil((1-gamma) * B)).
std::size_t upper_rank(double gamma, std::size_t b_count) {
  const double raw = std::ceil((1.0 - gamma) * static_cast<double>(b_count));
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::min(raw, static_cast<double>(b_count))));
  return rank;
}

}  // namespace

void BudgetSplit::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("BudgetSplit: alpha must lie in (0,1)");
  if (!(alpha1 > 0.0 && alpha1 <= alpha)) {
    std::ostringstream msg;
    msg << "BudgetSplit: alpha1 must lie in (0, alpha], got alpha1 = " << alpha1
        << ", alpha = " << alpha;
    throw DomainError(msg.str());
  }
}

void BootstrapConfig::validate() const {
  if (replicates < 50) throw DomainError("BootstrapConfig: need at least 50 replicates");
}

double posterior_upper_quantile(double z, const NormalModelSpec& spec, double alpha1) {
  spec.validate();
  if (!(alpha1 > 0.0 && alpha1 < 1.0)) {
    throw DomainError("posterior_upper_quantile: alpha1 must lie in (0,1)");
  }
  if (!(spec.hyper.tau2 > 0.0)) {
    throw DomainError("posterior_upper_quantile: degenerate prior (tau2 = 0)");
  }
  const Posterior post = posterior(z, spec);
  return post.mean + post.sd * norm_quantile(1.0 - alpha1);
}

double bootstrap_upper_bound(double z, double sigma2, const std::vector<GroupSummary>& summaries,
                             const BudgetSplit& split, const BootstrapConfig& cfg) {
  split.validate();
  cfg.validate();
  if (!std::isfinite(z)) throw DomainError("bootstrap_upper_bound: z must be finite");
  if (!(sigma2 > 0.0)) throw DomainError("bootstrap_upper_bound: sigma2 must be positive");
  if (summaries.size() < 2) throw DataError("bootstrap_upper_bound: need at least 2 groups");

  const HyperParams fit = cfg.forced_hyper ? *cfg.forced_hyper : estimate(summaries, cfg.estimator);
  const double gamma = split.alpha - split.alpha1;
  // Zero bootstrap budget: the bound is the plug-in quantile itself.
  if (gamma <= 0.0) return quantile_floored(z, sigma2, fit, split.alpha1, true);

  const BootstrapDraws draws = run_bootstrap(z, sigma2, summaries, split.alpha1, cfg, fit);
  return draws.upper[upper_rank(gamma, draws.upper.size()) - 1];
}

double one_sided_upper(double z, double sigma2, const std::vector<GroupSummary>& summaries,
                       const BudgetSplit& split, const BootstrapConfig& cfg) {
  return bootstrap_upper_bound(z, sigma2, summaries, split, cfg);
}

Interval two_sided_interval(double z, double sigma2, const std::vector<GroupSummary>& summaries,
                            double alpha, const BootstrapConfig& cfg, double alpha1_side) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("two_sided_interval: alpha must lie in (0,1)");
  cfg.validate();
  if (!std::isfinite(z)) throw DomainError("two_sided_interval: z must be finite");
  if (!(sigma2 > 0.0)) throw DomainError("two_sided_interval: sigma2 must be positive");
  if (summaries.size() < 2) throw DataError("two_sided_interval: need at least 2 groups");

  const double side_alpha = alpha / 2.0;
  if (alpha1_side <= 0.0) alpha1_side = alpha / 4.0;
  const BudgetSplit side{side_alpha, alpha1_side};
  side.validate();

  const HyperParams fit = cfg.forced_hyper ? *cfg.forced_hyper : estimate(summaries, cfg.estimator);
  const double gamma = side_alpha - alpha1_side;
  if (gamma <= 0.0) {
    return Interval{quantile_floored(z, sigma2, fit, alpha1_side, false),
                    quantile_floored(z, sigma2, fit, alpha1_side, true), 1.0 - alpha,
                    Method::qbound};
  }
  const BootstrapDraws draws = run_bootstrap(z, sigma2, summaries, alpha1_side, cfg, fit);
  const std::size_t b_count = draws.upper.size();
  const std::size_t rank = upper_rank(gamma, b_count);
  const double upper = draws.upper[rank - 1];
  const double lower = draws.lower[b_count - rank];  // mirrored conservative side
  return Interval{lower, upper, 1.0 - alpha, Method::qbound};
}

}  // namespace groupcover
