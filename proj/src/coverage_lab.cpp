#include "groupcover/coverage_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "groupcover/direct_intervals.hpp"
#include "groupcover/fab.hpp"
#include "groupcover/grouped_data.hpp"
#include "groupcover/quantile_bound.hpp"

namespace groupcover {

namespace {

using nlohmann::json;

// Stream-index layout under a scenario seed: 0 draws the group means, 1 the
// noise range, reps take 2 + rep.
constexpr std::uint64_t kMuStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kRepStreamBase = 2;
constexpr std::uint64_t kQboundKey = 0x9b00000000000000ULL;

// Fixed chunk size keeps partial sums identical for every thread count.
constexpr long kChunkReps = 64;

bool is_t_method(Method m) { return m == Method::umau_t || m == Method::fab_t; }

}  // namespace

void GDist::validate() const {
  if (kind == Kind::normal) {
    if (!std::isfinite(phi) || !(tau2 >= 0.0) || !std::isfinite(tau2)) {
      throw DataError("g_dist: normal parameters must be finite with tau2 >= 0");
    }
    return;
  }
  if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size()) {
    throw DataError("g_dist: mixture needs equally sized weights, means, variances");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DataError("g_dist: mixture weights must be nonnegative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw DataError("g_dist: mixture weights must sum to 1");
  for (double v : variances) {
    if (!(v > 0.0)) throw DataError("g_dist: mixture variances must be positive");
  }
  for (double m : means) {
    if (!std::isfinite(m)) throw DataError("g_dist: mixture means must be finite");
  }
}

double GDist::mean() const {
  if (kind == Kind::normal) return phi;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) acc += weights[k] * means[k];
  return acc;
}

double GDist::variance() const {
  if (kind == Kind::normal) return tau2;
  const double m = mean();
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k] * (variances[k] + means[k] * means[k]);
  }
  return acc - m * m;
}

double GDist::sample(RngStream& rng) const {
  if (kind == Kind::normal) return rng.normal(phi, std::sqrt(tau2));
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t pick = weights.size() - 1;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    cum += weights[k];
    if (u <= cum) {
      pick = k;
      break;
    }
  }
  return rng.normal(means[pick], std::sqrt(variances[pick]));
}

void NoiseSpec::validate() const {
  switch (kind) {
    case Kind::constant:
      if (!(sigma > 0.0)) throw DataError("noise: sigma must be positive");
      return;
    case Kind::list:
      if (sigmas.empty()) throw DataError("noise: sigma list must be nonempty");
      for (double s : sigmas) {
        if (!(s > 0.0)) throw DataError("noise: every sigma must be positive");
      }
      return;
    case Kind::range:
      if (!(lo > 0.0) || !(hi >= lo)) throw DataError("noise: need 0 < lo <= hi");
      return;
  }
}

void Scenario::validate() const {
  if (n_groups < 1) throw DataError("scenario: n_groups must be >= 1");
  g_dist.validate();
  noise.validate();
  if (noise.kind == NoiseSpec::Kind::list &&
      noise.sigmas.size() != static_cast<std::size_t>(n_groups)) {
    throw DataError("scenario: sigma list length must equal n_groups");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("scenario: alpha must lie in (0,1)");
  if (procedures.empty()) throw DataError("scenario: procedures must be nonempty");
  if (reps < 100) throw DataError("scenario: reps must be >= 100");
  if (per_group_n.size() > 1 && per_group_n.size() != static_cast<std::size_t>(n_groups)) {
    throw DataError("scenario: per_group_n must be a single value or one per group");
  }
  for (long n : per_group_n) {
    if (n < 1) throw DataError("scenario: per-group sample sizes must be >= 1");
  }
  for (const auto& [idx, mu] : mu_overrides) {
    if (idx < 0 || idx >= n_groups) throw DataError("scenario: mu_override index out of range");
    if (!std::isfinite(mu)) throw DataError("scenario: mu_override value must be finite");
  }
  const bool any_t = std::any_of(procedures.begin(), procedures.end(), is_t_method);
  if (any_t) {
    for (long n : per_group_n) {
      if (n < 2) throw DataError("scenario: t-based procedures need per-group n >= 2");
    }
    if (per_group_n.empty()) throw DataError("scenario: t-based procedures need per_group_n >= 2");
  }
  const bool any_pooled =
      std::any_of(procedures.begin(), procedures.end(), [](Method m) {
        return m == Method::eb || m == Method::fab_z || m == Method::fab_t || m == Method::qbound;
      });
  if (any_pooled && n_groups < 3) {
    throw DataError("scenario: pooled procedures need at least 3 groups");
  }
  if (qbound_replicates < 50) throw DataError("scenario: qbound_replicates must be >= 50");
}

namespace {

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec out;
  if (j.is_number()) {
    out.kind = NoiseSpec::Kind::constant;
    out.sigma = j.get<double>();
    return out;
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") {
    out.kind = NoiseSpec::Kind::constant;
    out.sigma = j.at("sigma").get<double>();
  } else if (type == "list") {
    out.kind = NoiseSpec::Kind::list;
    out.sigmas = j.at("sigmas").get<std::vector<double>>();
  } else if (type == "range") {
    out.kind = NoiseSpec::Kind::range;
    out.lo = j.at("lo").get<double>();
    out.hi = j.at("hi").get<double>();
  } else {
    throw DataError("noise: unknown type '" + type + "'");
  }
  return out;
}

json noise_to_json(const NoiseSpec& n) {
  switch (n.kind) {
    case NoiseSpec::Kind::constant: return json{{"type", "constant"}, {"sigma", n.sigma}};
    case NoiseSpec::Kind::list: return json{{"type", "list"}, {"sigmas", n.sigmas}};
    case NoiseSpec::Kind::range: return json{{"type", "range"}, {"lo", n.lo}, {"hi", n.hi}};
  }
  return {};
}

GDist gdist_from_json(const json& j) {
  GDist out;
  const std::string type = j.at("type").get<std::string>();
  if (type == "normal") {
    out.kind = GDist::Kind::normal;
    out.phi = j.at("phi").get<double>();
    out.tau2 = j.at("tau2").get<double>();
  } else if (type == "mixture") {
    out.kind = GDist::Kind::mixture;
    out.weights = j.at("weights").get<std::vector<double>>();
    out.means = j.at("means").get<std::vector<double>>();
    out.variances = j.at("variances").get<std::vector<double>>();
  } else {
    throw DataError("g_dist: unknown type '" + type + "'");
  }
  return out;
}

json gdist_to_json(const GDist& g) {
  if (g.kind == GDist::Kind::normal) {
    return json{{"type", "normal"}, {"phi", g.phi}, {"tau2", g.tau2}};
  }
  return json{{"type", "mixture"},
              {"weights", g.weights},
              {"means", g.means},
              {"variances", g.variances}};
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  try {
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    s.n_groups = j.at("n_groups").get<int>();
    s.g_dist = gdist_from_json(j.at("g_dist"));
    if (j.contains("noise")) s.noise = noise_from_json(j.at("noise"));
    if (j.contains("per_group_n")) {
      const auto& pn = j.at("per_group_n");
      if (pn.is_number()) {
        s.per_group_n = {pn.get<long>()};
      } else {
        s.per_group_n = pn.get<std::vector<long>>();
      }
    } else {
      s.per_group_n = {1};
    }
    s.alpha = j.value("alpha", 0.05);
    for (const auto& p : j.at("procedures")) {
      s.procedures.push_back(method_from_string(p.get<std::string>()));
    }
    s.reps = j.value("reps", 10000L);
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("estimator")) s.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    s.oracle_hyper = j.value("oracle_hyper", false);
    s.redraw_mu_each_rep = j.value("redraw_mu_each_rep", false);
    if (j.contains("fixed_linking")) {
      const auto& fl = j.at("fixed_linking");
      s.fixed_linking = HyperParams{fl.at("phi").get<double>(), fl.at("tau2").get<double>()};
    }
    if (j.contains("mu_overrides")) {
      for (const auto& o : j.at("mu_overrides")) {
        s.mu_overrides.emplace_back(o.at("index").get<int>(), o.at("mu").get<double>());
      }
    }
    s.threads = j.value("threads", 0);
    s.qbound_replicates = j.value("qbound_replicates", 200L);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("scenario json: ") + e.what());
  }
}

Scenario scenario_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(std::string("scenario json: ") + e.what());
  }
  return scenario_from_json(j);
}

json scenario_to_json(const Scenario& s) {
  json j{{"name", s.name},
         {"n_groups", s.n_groups},
         {"g_dist", gdist_to_json(s.g_dist)},
         {"noise", noise_to_json(s.noise)},
         {"alpha", s.alpha},
         {"reps", s.reps},
         {"seed", s.seed},
         {"estimator", to_string(s.estimator)},
         {"oracle_hyper", s.oracle_hyper},
         {"redraw_mu_each_rep", s.redraw_mu_each_rep},
         {"threads", s.threads},
         {"qbound_replicates", s.qbound_replicates}};
  if (s.per_group_n.size() == 1) {
    j["per_group_n"] = s.per_group_n[0];
  } else {
    j["per_group_n"] = s.per_group_n;
  }
  json procs = json::array();
  for (Method m : s.procedures) procs.push_back(to_string(m));
  j["procedures"] = procs;
  if (s.fixed_linking) {
    j["fixed_linking"] = json{{"phi", s.fixed_linking->phi}, {"tau2", s.fixed_linking->tau2}};
  }
  if (!s.mu_overrides.empty()) {
    json overrides = json::array();
    for (const auto& [idx, mu] : s.mu_overrides) {
      overrides.push_back(json{{"index", idx}, {"mu", mu}});
    }
    j["mu_overrides"] = overrides;
  }
  return j;
}

namespace {

// Per-chunk accumulators, combined in chunk order so the result does not
// depend on scheduling.
struct ChunkTally {
  std::vector<long> cover;        // method-major, group-minor
  std::vector<double> width_sum;  // same layout
  std::vector<long> failed;       // per method
};

struct ResolvedScenario {
  std::vector<std::string> ids;
  std::vector<double> mus;
  std::vector<double> sigmas;  // observation-level sigma
  std::vector<long> ns;
  bool need_raw = false;
};

ResolvedScenario resolve(const Scenario& sc) {
  ResolvedScenario r;
  const auto n = static_cast<std::size_t>(sc.n_groups);
  r.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "g%03zu", i);
    r.ids[i] = buf;
  }

  r.sigmas.resize(n);
  switch (sc.noise.kind) {
    case NoiseSpec::Kind::constant:
      std::fill(r.sigmas.begin(), r.sigmas.end(), sc.noise.sigma);
      break;
    case NoiseSpec::Kind::list:
      r.sigmas = sc.noise.sigmas;
      break;
    case NoiseSpec::Kind::range: {
      RngStream rng(sc.seed, kNoiseStream);
      for (std::size_t i = 0; i < n; ++i) {
        r.sigmas[i] = sc.noise.lo + (sc.noise.hi - sc.noise.lo) * rng.uniform();
      }
      break;
    }
  }

  r.ns.resize(n);
  if (sc.per_group_n.size() == 1) {
    std::fill(r.ns.begin(), r.ns.end(), sc.per_group_n[0]);
  } else {
    r.ns = sc.per_group_n;
  }

  RngStream mu_rng(sc.seed, kMuStream);
  r.mus.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.mus[i] = sc.g_dist.sample(mu_rng);
  for (const auto& [idx, mu] : sc.mu_overrides) r.mus[static_cast<std::size_t>(idx)] = mu;

  r.need_raw = std::any_of(sc.procedures.begin(), sc.procedures.end(), is_t_method);
  return r;
}

// One replication of every procedure; returns intervals per method/group or
// marks the method failed for this rep.
void run_rep(const Scenario& sc, const ResolvedScenario& rs, long rep, ChunkTally& tally) {
  const auto n = static_cast<std::size_t>(sc.n_groups);
  RngStream rng(sc.seed, kRepStreamBase + static_cast<std::uint64_t>(rep));

  std::vector<double> mus = rs.mus;
  if (sc.redraw_mu_each_rep) {
    for (std::size_t i = 0; i < n; ++i) mus[i] = sc.g_dist.sample(rng);
    for (const auto& [idx, mu] : sc.mu_overrides) mus[static_cast<std::size_t>(idx)] = mu;
  }

  std::vector<GroupSummary> z_view(n);
  std::vector<GroupSummary> t_view;
  if (rs.need_raw) t_view.resize(n);
  std::vector<double> vs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long ni = rs.ns[i];
    double z = 0.0;
    if (rs.need_raw) {
      double acc = 0.0;
      std::vector<double> xs(static_cast<std::size_t>(ni));
      for (auto& x : xs) {
        x = rng.normal(mus[i], rs.sigmas[i]);
        acc += x;
      }
      z = acc / static_cast<double>(ni);
      double ss = 0.0;
      for (double x : xs) ss += (x - z) * (x - z);
      t_view[i].id = rs.ids[i];
      t_view[i].n = ni;
      t_view[i].mean = z;
      t_view[i].sd = std::sqrt(ss / static_cast<double>(ni - 1));
    } else {
      z = rng.normal(mus[i], rs.sigmas[i] / std::sqrt(static_cast<double>(ni)));
    }
    z_view[i].id = rs.ids[i];
    z_view[i].n = ni;
    z_view[i].mean = z;
    z_view[i].known_sigma = rs.sigmas[i];
    vs[i] = rs.sigmas[i] * rs.sigmas[i] / static_cast<double>(ni);
  }

  double total_v_z = 0.0;
  for (double v : vs) total_v_z += v;

  std::vector<Interval> intervals(n);
  for (std::size_t m = 0; m < sc.procedures.size(); ++m) {
    const Method method = sc.procedures[m];
    try {
      switch (method) {
        case Method::umau_z:
          for (std::size_t i = 0; i < n; ++i) {
            intervals[i] = umau_z(z_view[i].mean, std::sqrt(vs[i]), sc.alpha);
          }
          break;
        case Method::umau_t:
          for (std::size_t i = 0; i < n; ++i) intervals[i] = umau_t(t_view[i], sc.alpha);
          break;
        case Method::eb: {
          const HyperParams hyper = sc.oracle_hyper
                                        ? HyperParams{sc.g_dist.mean(), sc.g_dist.variance()}
                                        : estimate(z_view, sc.estimator);
          for (std::size_t i = 0; i < n; ++i) {
            intervals[i] = eb_interval(z_view[i].mean, NormalModelSpec{hyper, vs[i]}, sc.alpha);
          }
          break;
        }
        case Method::fab_z:
          for (std::size_t i = 0; i < n; ++i) {
            const double pooled = (total_v_z - vs[i]) / static_cast<double>(n - 1);
            const HyperParams hyper = sc.fixed_linking
                                          ? *sc.fixed_linking
                                          : loo_hyperparams(z_view, i, sc.estimator);
            intervals[i] = fab_interval_z(z_view[i].mean, std::sqrt(vs[i]),
                                          LinkingModel{hyper, pooled}, sc.alpha);
          }
          break;
        case Method::fab_t: {
          double total_v_t = 0.0;
          for (const auto& s : t_view) total_v_t += s.noise_variance();
          for (std::size_t i = 0; i < n; ++i) {
            const double pooled =
                (total_v_t - t_view[i].noise_variance()) / static_cast<double>(n - 1);
            const HyperParams hyper = sc.fixed_linking
                                          ? *sc.fixed_linking
                                          : loo_hyperparams(t_view, i, sc.estimator);
            intervals[i] = fab_interval_t(t_view[i], LinkingModel{hyper, pooled}, sc.alpha);
          }
          break;
        }
        case Method::qbound:
          for (std::size_t i = 0; i < n; ++i) {
            BootstrapConfig cfg;
            cfg.replicates = sc.qbound_replicates;
            cfg.estimator = sc.estimator;
            cfg.rng = rng.split(kQboundKey + i);
            intervals[i] = two_sided_interval(z_view[i].mean, vs[i], z_view, sc.alpha, cfg);
          }
          break;
      }
    } catch (const Error&) {
      ++tally.failed[m];
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t slot = m * n + i;
      if (intervals[i].contains(mus[i])) ++tally.cover[slot];
      tally.width_sum[slot] += intervals[i].width();
    }
  }
}

}  // namespace

CoverageReport simulate_coverage(const Scenario& scenario) {
  scenario.validate();
  const ResolvedScenario rs = resolve(scenario);
  const auto n = static_cast<std::size_t>(scenario.n_groups);
  const std::size_t n_methods = scenario.procedures.size();

  const long n_chunks = (scenario.reps + kChunkReps - 1) / kChunkReps;
  std::vector<ChunkTally> tallies(static_cast<std::size_t>(n_chunks));
  for (auto& t : tallies) {
    t.cover.assign(n_methods * n, 0);
    t.width_sum.assign(n_methods * n, 0.0);
    t.failed.assign(n_methods, 0);
  }

  auto run_chunk = [&](long chunk) {
    const long begin = chunk * kChunkReps;
    const long end = std::min(begin + kChunkReps, scenario.reps);
    for (long rep = begin; rep < end; ++rep) {
      run_rep(scenario, rs, rep, tallies[static_cast<std::size_t>(chunk)]);
    }
  };

  int threads = scenario.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min<long>(threads, n_chunks);

  if (threads <= 1) {
    for (long chunk = 0; chunk < n_chunks; ++chunk) run_chunk(chunk);
  } else {
    std::atomic<long> next{0};
    std::vector<std::future<void>> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      workers.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          const long chunk = next.fetch_add(1);
          if (chunk >= n_chunks) return;
          run_chunk(chunk);
        }
      }));
    }
    for (auto& w : workers) w.get();
  }

  CoverageReport report;
  report.scenario_name = scenario.name;
  report.alpha = scenario.alpha;
  report.reps = scenario.reps;
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodReport mr;
    mr.method = scenario.procedures[m];
    long failed = 0;
    for (const auto& t : tallies) failed += t.failed[m];
    mr.failed_reps = failed;
    const long valid = scenario.reps - failed;
    double cov_acc = 0.0;
    double width_acc = 0.0;
    mr.min_coverage = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      long cover = 0;
      double width = 0.0;
      for (const auto& t : tallies) {
        cover += t.cover[m * n + i];
        width += t.width_sum[m * n + i];
      }
      GroupCoverage gc;
      gc.group = rs.ids[i];
      gc.true_mu = scenario.redraw_mu_each_rep ? std::numeric_limits<double>::quiet_NaN()
                                               : rs.mus[i];
      if (valid > 0) {
        gc.coverage = static_cast<double>(cover) / static_cast<double>(valid);
        gc.se = std::sqrt(gc.coverage * (1.0 - gc.coverage) / static_cast<double>(valid));
        gc.mean_width = width / static_cast<double>(valid);
      } else {
        warn("simulate_coverage: method " + to_string(mr.method) + " failed in every rep");
      }
      cov_acc += gc.coverage;
      width_acc += gc.mean_width;
      mr.min_coverage = std::min(mr.min_coverage, gc.coverage);
      mr.per_group.push_back(std::move(gc));
    }
    mr.average_coverage = cov_acc / static_cast<double>(n);
    mr.mean_width = width_acc / static_cast<double>(n);
    report.methods.push_back(std::move(mr));
  }

  for (std::size_t a = 0; a < n_methods; ++a) {
    for (std::size_t b = 0; b < n_methods; ++b) {
      if (a == b) continue;
      WidthPair wp;
      wp.a = scenario.procedures[a];
      wp.b = scenario.procedures[b];
      long narrower = 0;
      double ratio_acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double wa = report.methods[a].per_group[i].mean_width;
        const double wb = report.methods[b].per_group[i].mean_width;
        if (wa < wb) ++narrower;
        ratio_acc += wb / wa;
      }
      wp.fraction_a_narrower = static_cast<double>(narrower) / static_cast<double>(n);
      wp.mean_width_ratio = ratio_acc / static_cast<double>(n);
      report.width_pairs.push_back(wp);
    }
  }
  return report;
}

json report_to_json(const CoverageReport& report) {
  json methods = json::array();
  for (const auto& mr : report.methods) {
    json per_group = json::array();
    for (const auto& g : mr.per_group) {
      per_group.push_back(json{{"group", g.group},
                               {"true_mu", g.true_mu},
                               {"coverage", g.coverage},
                               {"se", g.se},
                               {"mean_width", g.mean_width}});
    }
    methods.push_back(json{{"method", to_string(mr.method)},
                           {"average_coverage", mr.average_coverage},
                           {"min_coverage", mr.min_coverage},
                           {"mean_width", mr.mean_width},
                           {"failed_reps", mr.failed_reps},
                           {"per_group", per_group}});
  }
  json pairs = json::array();
  for (const auto& wp : report.width_pairs) {
    pairs.push_back(json{{"a", to_string(wp.a)},
                         {"b", to_string(wp.b)},
                         {"fraction_a_narrower", wp.fraction_a_narrower},
                         {"mean_width_ratio", wp.mean_width_ratio}});
  }
  return json{{"scenario", report.scenario_name},
              {"alpha", report.alpha},
              {"reps", report.reps},
              {"methods", methods},
              {"width_pairs", pairs}};
}

void write_report_csv(std::ostream& out, const CoverageReport& report) {
  out << "group,true_mu,method,coverage,se,mean_width\n";
  char buf[64];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    out << buf;
  };
  if (report.methods.empty()) return;
  const std::size_t n = report.methods.front().per_group.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& mr : report.methods) {
      const auto& g = mr.per_group[i];
      out << g.group << ',';
      put(g.true_mu);
      out << ',' << to_string(mr.method) << ',';
      put(g.coverage);
      out << ',';
      put(g.se);
      out << ',';
      put(g.mean_width);
      out << '\n';
    }
  }
}

double average_coverage_identity_check(const NormalModelSpec& spec, double alpha,
                                       int quad_points) {
  spec.validate();
  if (!(spec.hyper.tau2 > 0.0)) {
    throw DomainError("average_coverage_identity_check: tau2 must be positive");
  }
  if (quad_points < 100) {
    throw DomainError("average_coverage_identity_check: quad_points must be >= 100");
  }
  int n = quad_points;
  if (n % 2 == 0) ++n;  // Simpson needs an odd node count
  const double tau = std::sqrt(spec.hyper.tau2);
  const double lo = spec.hyper.phi - 10.0 * tau;
  const double hi = spec.hyper.phi + 10.0 * tau;
  const double h = (hi - lo) / (n - 1);
  auto f = [&](double mu) {
    const double d = (mu - spec.hyper.phi) / tau;
    return exact_eb_coverage(mu, spec, alpha) * std::exp(-0.5 * d * d) /
           (tau * 2.5066282746310002);
  };
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n - 1; ++i) acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

std::vector<Interval> intervals_for_method(const std::vector<GroupSummary>& summaries,
                                           double alpha, Method method, Estimator estimator,
                                           std::uint64_t seed, long qbound_replicates) {
  if (summaries.empty()) throw DataError("intervals_for_method: no groups");
  std::vector<Interval> out;
  out.reserve(summaries.size());
  switch (method) {
    case Method::umau_t:
      for (const auto& s : summaries) out.push_back(umau_t(s, alpha));
      break;
    case Method::umau_z:
      for (const auto& s : summaries) {
        if (!s.known_sigma) {
          throw DataError("umau_z needs known_sigma for group " + s.id);
        }
        out.push_back(
            umau_z(s.mean, *s.known_sigma / std::sqrt(static_cast<double>(s.n)), alpha));
      }
      break;
    case Method::eb: {
      const HyperParams hyper = estimate(summaries, estimator);
      for (const auto& s : summaries) {
        out.push_back(eb_interval(s.mean, NormalModelSpec{hyper, s.noise_variance()}, alpha));
      }
      break;
    }
    case Method::fab_t:
    case Method::fab_z:
      out = fab_all_groups(summaries, alpha, estimator);
      break;
    case Method::qbound: {
      const RngStream base(seed, kQboundKey);
      for (std::size_t i = 0; i < summaries.size(); ++i) {
        BootstrapConfig cfg;
        cfg.replicates = qbound_replicates;
        cfg.estimator = estimator;
        cfg.rng = base.split(i);
        out.push_back(two_sided_interval(summaries[i].mean, summaries[i].noise_variance(),
                                         summaries, alpha, cfg));
      }
      break;
    }
  }
  return out;
}

WidthComparison width_comparison(const std::vector<GroupSummary>& summaries, double alpha,
                                 Method method_a, Method method_b, Estimator estimator,
                                 std::uint64_t seed, long qbound_replicates) {
  const auto a = intervals_for_method(summaries, alpha, method_a, estimator, seed,
                                      qbound_replicates);
  const auto b = intervals_for_method(summaries, alpha, method_b, estimator, seed,
                                      qbound_replicates);
  long narrower = 0;
  double ratio_acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].width() < b[i].width()) ++narrower;
    ratio_acc += b[i].width() / a[i].width();
  }
  WidthComparison out;
  out.fraction_a_narrower = static_cast<double>(narrower) / static_cast<double>(a.size());
  out.mean_width_ratio = ratio_acc / static_cast<double>(a.size());
  return out;
}

}  // namespace groupcover
