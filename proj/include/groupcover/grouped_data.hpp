#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "groupcover/types.hpp"

namespace groupcover {

// Reads raw observations from CSV with header `group,value`. Groups appear
// in input order of first appearance. Parse failures report the line number.
std::vector<GroupObservations> ingest_raw(std::istream& in);
std::vector<GroupObservations> ingest_raw_file(const std::string& path);

// Reads pre-aggregated summaries from CSV with header `group,n,mean,sd`.
std::vector<GroupSummary> read_aggregated(std::istream& in);
std::vector<GroupSummary> read_aggregated_file(const std::string& path);

void write_aggregated(std::ostream& out, const std::vector<GroupSummary>& summaries);

// Per-group mean and sample sd (n-1 denominator), dropping groups with
// fewer than min_n observations. DataError when nothing survives.
std::vector<GroupSummary> summarize(const std::vector<GroupObservations>& groups, long min_n);

// Method-of-moments fit of the normal linking model: phi-hat is the
// unweighted mean of the group means, tau2-hat the sample variance of the
// group means minus the average noise variance, truncated at zero.
HyperParams mom_estimate(const std::vector<GroupSummary>& summaries);

// Marginal maximum likelihood for the same model, profiled over tau2 on a
// log grid with golden-section refinement; phi(tau2) is the precision
// weighted mean.
HyperParams mle_estimate(const std::vector<GroupSummary>& summaries);

HyperParams estimate(const std::vector<GroupSummary>& summaries, Estimator estimator);

// Re-estimates the hyperparameters with group `index` left out. The result
// does not depend on that group's data in any way.
HyperParams loo_hyperparams(const std::vector<GroupSummary>& summaries, std::size_t index,
                            Estimator estimator);

}  // namespace groupcover
