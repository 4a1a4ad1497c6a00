#include "groupcover/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "groupcover/coverage_lab.hpp"
#include "groupcover/direct_intervals.hpp"
#include "groupcover/eb_normal.hpp"
#include "groupcover/fab.hpp"
#include "groupcover/grouped_data.hpp"
#include "groupcover/numerics.hpp"
#include "groupcover/quantile_bound.hpp"
#include "groupcover/types.hpp"

namespace groupcover::cli {

namespace {

using nlohmann::json;

std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

// Seed resolution: --seed flag wins, then GROUPCOVER_SEED, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("GROUPCOVER_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DataError(std::string("GROUPCOVER_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

// Input CSVs are detected by header: `group,value` raw rows are summarized
// (dropping groups below min_n), `group,n,mean,sd` rows are taken as is.
std::vector<GroupSummary> load_summaries(const std::string& path, long min_n) {
  std::ifstream probe(path);
  if (!probe) throw DataError("cannot open file: " + path);
  std::string header;
  std::getline(probe, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  probe.close();
  if (header.rfind("group,value", 0) == 0) {
    return summarize(ingest_raw_file(path), min_n);
  }
  return read_aggregated_file(path);
}

void emit(const std::string& text, const std::string& output_path, std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(output_path, std::ios::binary);
  if (!f) throw DataError("cannot open output file: " + output_path);
  f << text;
}

struct GridSpec {
  double lo = 0, hi = 0, step = 0;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw DataError("grid must look like lo:hi:step, got '" + text + "'");
  }
  try {
    g.lo = std::stod(text.substr(0, first));
    g.hi = std::stod(text.substr(first + 1, second - first - 1));
    g.step = std::stod(text.substr(second + 1));
  } catch (const std::exception&) {
    throw DataError("grid must look like lo:hi:step, got '" + text + "'");
  }
  if (!(g.step > 0.0) || !(g.hi >= g.lo)) throw DataError("grid needs hi >= lo and step > 0");
  return g;
}

std::string intervals_csv(const std::vector<GroupSummary>& summaries,
                          const std::vector<Interval>& intervals, double alpha) {
  std::ostringstream os;
  os << "group,n,mean,method,alpha,lower,upper,width\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    const auto& iv = intervals[i];
    os << s.id << ',' << s.n << ',' << fmt9(s.mean) << ',' << to_string(iv.method) << ','
       << fmt9(alpha) << ',' << fmt9(iv.lower) << ',' << fmt9(iv.upper) << ','
       << fmt9(iv.width()) << '\n';
  }
  return os.str();
}

json intervals_json(const std::vector<GroupSummary>& summaries,
                    const std::vector<Interval>& intervals, double alpha) {
  json rows = json::array();
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    const auto& iv = intervals[i];
    rows.push_back(json{{"group", s.id},
                        {"n", s.n},
                        {"mean", s.mean},
                        {"method", to_string(iv.method)},
                        {"alpha", alpha},
                        {"lower", iv.lower},
                        {"upper", iv.upper},
                        {"width", iv.width()}});
  }
  return rows;
}

Method resolve_method_tag(const std::string& tag, const std::vector<GroupSummary>& summaries) {
  if (tag == "umau") {
    const bool has_sd =
        !summaries.empty() && summaries.front().sd && summaries.front().n >= 2;
    return has_sd ? Method::umau_t : Method::umau_z;
  }
  if (tag == "fab") {
    const bool has_sd =
        !summaries.empty() && summaries.front().sd && summaries.front().n >= 2;
    return has_sd ? Method::fab_t : Method::fab_z;
  }
  return method_from_string(tag);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

namespace {

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multigroup confidence intervals with coverage diagnostics"};
  app.name("groupcover");
  app.require_subcommand(1);

  // fit ----------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Estimate the normal linking model (phi, tau2)");
  std::string fit_input;
  std::string fit_estimator = "mom";
  long fit_min_n = 2;
  std::string fit_format = "csv";
  std::string fit_output;
  fit->add_option("--input", fit_input, "CSV: raw `group,value` or aggregated `group,n,mean,sd`")
      ->required();
  fit->add_option("--estimator", fit_estimator, "Hyperparameter estimator: mom or mle")
      ->check(CLI::IsMember({"mom", "mle"}));
  fit->add_option("--min-n", fit_min_n, "Drop raw groups with fewer observations (default 2)");
  fit->add_option("--format", fit_format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  fit->add_option("--output", fit_output, "Write to this path instead of stdout");

  // intervals ----------------------------------------------------------
  auto* intervals = app.add_subcommand("intervals", "Per-group confidence intervals");
  std::string iv_input, iv_method, iv_output;
  std::string iv_estimator = "mom";
  std::string iv_format = "csv";
  double iv_alpha = 0.05;
  long iv_min_n = 2;
  long iv_bootstrap = 200;
  std::optional<std::uint64_t> iv_seed;
  intervals->add_option("--input", iv_input, "CSV: raw `group,value` or aggregated `group,n,mean,sd`")
      ->required();
  intervals->add_option("--method", iv_method, "umau, eb, fab, or qbound")->required();
  intervals->add_option("--alpha", iv_alpha, "Miscoverage level (default 0.05)")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  intervals->add_option("--estimator", iv_estimator, "Hyperparameter estimator: mom or mle")
      ->check(CLI::IsMember({"mom", "mle"}));
  intervals->add_option("--min-n", iv_min_n, "Drop raw groups with fewer observations (default 2)");
  intervals->add_option("--seed", iv_seed, "RNG seed (fallback: env GROUPCOVER_SEED, then 0)");
  intervals->add_option("--bootstrap-reps", iv_bootstrap, "qbound bootstrap replicates (default 200)");
  intervals->add_option("--format", iv_format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  intervals->add_option("--output", iv_output, "Write to this path instead of stdout");

  // coverage-curve -------------------------------------------------------
  auto* curve = app.add_subcommand("coverage-curve",
                                   "Exact frequentist coverage of the posterior interval");
  double cv_phi = 0.0, cv_tau2 = 1.0, cv_sigma2 = 1.0, cv_alpha = 0.05;
  std::string cv_grid = "-6:6:0.1";
  std::string cv_format = "csv";
  std::string cv_output;
  curve->add_option("--phi", cv_phi, "Linking mean (default 0)");
  curve->add_option("--tau2", cv_tau2, "Linking variance (default 1, must be > 0)");
  curve->add_option("--sigma2", cv_sigma2, "Sampling variance (default 1)");
  curve->add_option("--alpha", cv_alpha, "Miscoverage level (default 0.05)")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  curve->add_option("--grid", cv_grid, "Mean grid lo:hi:step (default -6:6:0.1)");
  curve->add_option("--format", cv_format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  curve->add_option("--output", cv_output, "Write to this path instead of stdout");

  // simulate -------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage experiment");
  std::string sim_scenario;
  std::string sim_format = "json";
  std::string sim_output;
  int sim_threads = -1;
  simulate->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
  simulate->add_option("--threads", sim_threads, "Worker threads (default: scenario/hardware)");
  simulate->add_option("--format", sim_format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--output", sim_output, "Write to this path instead of stdout");

  // compare --------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "Width comparison of two methods on real data");
  std::string cp_input, cp_a, cp_b, cp_output;
  std::string cp_estimator = "mom";
  std::string cp_format = "csv";
  double cp_alpha = 0.05;
  long cp_min_n = 2;
  long cp_bootstrap = 200;
  std::optional<std::uint64_t> cp_seed;
  compare->add_option("--input", cp_input, "CSV: raw `group,value` or aggregated `group,n,mean,sd`")
      ->required();
  compare->add_option("--a", cp_a, "First method: umau, eb, fab, or qbound")->required();
  compare->add_option("--b", cp_b, "Second method: umau, eb, fab, or qbound")->required();
  compare->add_option("--alpha", cp_alpha, "Miscoverage level (default 0.05)")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  compare->add_option("--estimator", cp_estimator, "Hyperparameter estimator: mom or mle")
      ->check(CLI::IsMember({"mom", "mle"}));
  compare->add_option("--min-n", cp_min_n, "Drop raw groups with fewer observations (default 2)");
  compare->add_option("--seed", cp_seed, "RNG seed (fallback: env GROUPCOVER_SEED, then 0)");
  compare->add_option("--bootstrap-reps", cp_bootstrap, "qbound bootstrap replicates (default 200)");
  compare->add_option("--format", cp_format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  compare->add_option("--output", cp_output, "Write to this path instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    const int code = app.exit(e, os, os);
    if (code == 0) {
      out << os.str();
      return kExitOk;
    }
    err << os.str();
    return kExitUsage;
  }

  if (fit->parsed()) {
    const auto summaries = load_summaries(fit_input, fit_min_n);
    const HyperParams hp = estimate(summaries, estimator_from_string(fit_estimator));
    std::string text;
    if (fit_format == "csv") {
      std::ostringstream os;
      os << "estimator,n_groups,phi,tau2\n"
         << fit_estimator << ',' << summaries.size() << ',' << fmt9(hp.phi) << ','
         << fmt9(hp.tau2) << '\n';
      text = os.str();
    } else {
      text = json{{"estimator", fit_estimator},
                  {"n_groups", summaries.size()},
                  {"phi", hp.phi},
                  {"tau2", hp.tau2}}
                 .dump(2) +
             "\n";
    }
    emit(text, fit_output, out);
    return kExitOk;
  }

  if (intervals->parsed()) {
    const auto summaries = load_summaries(iv_input, iv_min_n);
    const Method method = resolve_method_tag(iv_method, summaries);
    const auto ivs = intervals_for_method(summaries, iv_alpha, method,
                                          estimator_from_string(iv_estimator),
                                          resolve_seed(iv_seed), iv_bootstrap);
    const std::string text = iv_format == "csv"
                                 ? intervals_csv(summaries, ivs, iv_alpha)
                                 : intervals_json(summaries, ivs, iv_alpha).dump(2) + "\n";
    emit(text, iv_output, out);
    return kExitOk;
  }

  if (curve->parsed()) {
    const GridSpec g = parse_grid(cv_grid);
    const long count = std::lround((g.hi - g.lo) / g.step) + 1;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) grid.push_back(g.lo + static_cast<double>(i) * g.step);
    const NormalModelSpec spec{HyperParams{cv_phi, cv_tau2}, cv_sigma2};
    const auto points = coverage_curve(spec, cv_alpha, grid);
    std::string text;
    if (cv_format == "csv") {
      std::ostringstream os;
      write_coverage_curve_csv(os, points);
      text = os.str();
    } else {
      json rows = json::array();
      for (const auto& [mu, cov] : points) rows.push_back(json{{"mu", mu}, {"coverage", cov}});
      text = rows.dump(2) + "\n";
    }
    emit(text, cv_output, out);
    return kExitOk;
  }

  if (simulate->parsed()) {
    Scenario scenario = scenario_from_json_file(sim_scenario);
    if (sim_threads >= 0) scenario.threads = sim_threads;
    const CoverageReport report = simulate_coverage(scenario);
    std::string text;
    if (sim_format == "csv") {
      std::ostringstream os;
      write_report_csv(os, report);
      text = os.str();
    } else {
      text = report_to_json(report).dump(2) + "\n";
    }
    emit(text, sim_output, out);
    return kExitOk;
  }

  if (compare->parsed()) {
    const auto summaries = load_summaries(cp_input, cp_min_n);
    const Method a = resolve_method_tag(cp_a, summaries);
    const Method b = resolve_method_tag(cp_b, summaries);
    const WidthComparison wc =
        width_comparison(summaries, cp_alpha, a, b, estimator_from_string(cp_estimator),
                         resolve_seed(cp_seed), cp_bootstrap);
    std::string text;
    if (cp_format == "csv") {
      std::ostringstream os;
      os << "method_a,method_b,n_groups,fraction_a_narrower,mean_width_ratio\n"
         << to_string(a) << ',' << to_string(b) << ',' << summaries.size() << ','
         << fmt9(wc.fraction_a_narrower) << ',' << fmt9(wc.mean_width_ratio) << '\n';
      text = os.str();
    } else {
      text = json{{"method_a", to_string(a)},
                  {"method_b", to_string(b)},
                  {"n_groups", summaries.size()},
                  {"fraction_a_narrower", wc.fraction_a_narrower},
                  {"mean_width_ratio", wc.mean_width_ratio}}
                 .dump(2) +
             "\n";
    }
    emit(text, cp_output, out);
    return kExitOk;
  }

  err << "error: no subcommand given\n";
  return kExitUsage;
}

}  // namespace

}  // namespace groupcover::cli
