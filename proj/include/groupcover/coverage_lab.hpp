#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "groupcover/eb_normal.hpp"
#include "groupcover/numerics.hpp"
#include "groupcover/types.hpp"

namespace groupcover {

// Across-group truth: a normal or a finite normal mixture.
struct GDist {
  enum class Kind { normal, mixture };
  Kind kind = Kind::normal;
  double phi = 0.0;
  double tau2 = 1.0;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  void validate() const;
  double mean() const;
  double variance() const;
  double sample(RngStream& rng) const;
};

// Per-group observation-level sigma: one value for all groups, an explicit
// list, or a range sampled once per scenario.
struct NoiseSpec {
  enum class Kind { constant, list, range };
  Kind kind = Kind::constant;
  double sigma = 1.0;
  std::vector<double> sigmas;
  double lo = 0.5;
  double hi = 2.0;

  void validate() const;
};

struct Scenario {
  std::string name;
  int n_groups = 0;
  GDist g_dist;
  NoiseSpec noise;
  std::vector<long> per_group_n;  // single entry broadcasts to every group
  double alpha = 0.05;
  std::vector<Method> procedures;
  long reps = 10000;
  std::uint64_t seed = 0;

  Estimator estimator = Estimator::mom;
  bool oracle_hyper = false;        // plug in the true (phi, tau2), no estimation
  bool redraw_mu_each_rep = false;  // marginal-coverage mode
  std::optional<HyperParams> fixed_linking;  // fab procedures skip leave-one-out
  std::vector<std::pair<int, double>> mu_overrides;
  int threads = 0;  // 0 = hardware concurrency
  long qbound_replicates = 200;

  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j);
Scenario scenario_from_json_file(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& scenario);

struct GroupCoverage {
  std::string group;
  double true_mu = 0.0;
  double coverage = 0.0;
  double se = 0.0;
  double mean_width = 0.0;
};

struct MethodReport {
  Method method = Method::umau_z;
  std::vector<GroupCoverage> per_group;
  double average_coverage = 0.0;
  double min_coverage = 0.0;
  double mean_width = 0.0;
  long failed_reps = 0;
};

struct WidthPair {
  Method a = Method::umau_z;
  Method b = Method::umau_z;
  double fraction_a_narrower = 0.0;
  double mean_width_ratio = 0.0;  // mean over groups of width_b / width_a
};

struct CoverageReport {
  std::string scenario_name;
  double alpha = 0.05;
  long reps = 0;
  std::vector<MethodReport> methods;
  std::vector<WidthPair> width_pairs;
};

// Runs the scenario: the group means are drawn once (coverage is conditional
// on them), then every rep draws fresh data and runs each procedure.
// Deterministic given the seed; replications use per-rep substreams and a
// fixed chunking, so thread count does not change the result.
CoverageReport simulate_coverage(const Scenario& scenario);

nlohmann::json report_to_json(const CoverageReport& report);

// CSV with header `group,true_mu,method,coverage,se,mean_width`.
void write_report_csv(std::ostream& out, const CoverageReport& report);

// Numerically integrates exact_eb_coverage(mu) against the N(phi, tau2)
// density; the posterior interval's frequentist coverage averages to 1 - alpha.
double average_coverage_identity_check(const NormalModelSpec& spec, double alpha,
                                       int quad_points);

struct WidthComparison {
  double fraction_a_narrower = 0.0;
  double mean_width_ratio = 0.0;  // mean over groups of width_b / width_a
};

// Builds both interval sets on real summaries (no simulation) and compares
// widths group by group. seed feeds the qbound bootstrap when that method is
// requested.
WidthComparison width_comparison(const std::vector<GroupSummary>& summaries, double alpha,
                                 Method method_a, Method method_b,
                                 Estimator estimator = Estimator::mom, std::uint64_t seed = 0,
                                 long qbound_replicates = 200);

// Interval sets used by width_comparison and the CLI `intervals` subcommand.
std::vector<Interval> intervals_for_method(const std::vector<GroupSummary>& summaries,
                                           double alpha, Method method,
                                           Estimator estimator = Estimator::mom,
                                           std::uint64_t seed = 0, long qbound_replicates = 200);

}  // namespace groupcover
