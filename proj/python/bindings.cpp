#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "groupcover/coverage_lab.hpp"
#include "groupcover/direct_intervals.hpp"
#include "groupcover/eb_normal.hpp"
#include "groupcover/fab.hpp"
#include "groupcover/grouped_data.hpp"
#include "groupcover/numerics.hpp"
#include "groupcover/quantile_bound.hpp"

namespace py = pybind11;
using namespace groupcover;

namespace {

GroupSummary make_summary(std::string id, long n, double mean, std::optional<double> sd,
                          std::optional<double> known_sigma) {
  GroupSummary s;
  s.id = std::move(id);
  s.n = n;
  s.mean = mean;
  s.sd = sd;
  s.known_sigma = known_sigma;
  return s;
}

BootstrapConfig make_bootstrap_config(long replicates, const std::string& estimator,
                                      std::uint64_t seed,
                                      std::optional<HyperParams> forced_hyper) {
  BootstrapConfig cfg;
  cfg.replicates = replicates;
  cfg.estimator = estimator_from_string(estimator);
  cfg.rng = RngStream(seed, 0);
  cfg.forced_hyper = forced_hyper;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_groupcover, m) {
  m.doc() = "Multigroup confidence intervals: direct, empirical Bayes, FAB, quantile-bound";

  // Base first: pybind11 tries translators in reverse registration order.
  py::register_exception<Error>(m, "GroupcoverError", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  // numerics -------------------------------------------------------------
  m.def("norm_cdf", &norm_cdf, py::arg("x"));
  m.def("norm_quantile", &norm_quantile, py::arg("p"));
  m.def("norm_pdf", &norm_pdf, py::arg("x"));
  m.def("t_cdf", &t_cdf, py::arg("x"), py::arg("dof"));
  m.def("t_quantile", &t_quantile, py::arg("p"), py::arg("dof"));

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed"),
           py::arg("stream_index") = 0)
      .def_property_readonly("master_seed", &RngStream::master_seed)
      .def_property_readonly("stream_index", &RngStream::stream_index)
      .def("uniform", &RngStream::uniform)
      .def("normal", py::overload_cast<>(&RngStream::normal))
      .def("normal", py::overload_cast<double, double>(&RngStream::normal), py::arg("mean"),
           py::arg("sd"))
      .def("split", &RngStream::split, py::arg("key"));

  // types ------------------------------------------------------------------
  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<double, double>(), py::arg("phi"), py::arg("tau2"))
      .def_readwrite("phi", &HyperParams::phi)
      .def_readwrite("tau2", &HyperParams::tau2)
      .def("__repr__", [](const HyperParams& h) {
        std::ostringstream os;
        os << "HyperParams(phi=" << h.phi << ", tau2=" << h.tau2 << ")";
        return os.str();
      });

  py::class_<Interval>(m, "Interval")
      .def_readonly("lower", &Interval::lower)
      .def_readonly("upper", &Interval::upper)
      .def_readonly("level", &Interval::level)
      .def_property_readonly("method", [](const Interval& iv) { return to_string(iv.method); })
      .def("width", &Interval::width)
      .def("contains", &Interval::contains, py::arg("mu"))
      .def("__repr__", [](const Interval& iv) {
        std::ostringstream os;
        os << "Interval(" << iv.lower << ", " << iv.upper << ", level=" << iv.level
           << ", method=" << to_string(iv.method) << ")";
        return os.str();
      });

  py::class_<GroupSummary>(m, "GroupSummary")
      .def(py::init(&make_summary), py::arg("id"), py::arg("n"), py::arg("mean"),
           py::arg("sd") = std::nullopt, py::arg("known_sigma") = std::nullopt)
      .def_readwrite("id", &GroupSummary::id)
      .def_readwrite("n", &GroupSummary::n)
      .def_readwrite("mean", &GroupSummary::mean)
      .def_readwrite("sd", &GroupSummary::sd)
      .def_readwrite("known_sigma", &GroupSummary::known_sigma)
      .def("noise_variance", &GroupSummary::noise_variance)
      .def("__repr__", [](const GroupSummary& s) {
        std::ostringstream os;
        os << "GroupSummary(id='" << s.id << "', n=" << s.n << ", mean=" << s.mean << ")";
        return os.str();
      });

  py::class_<NormalModelSpec>(m, "NormalModelSpec")
      .def(py::init([](double phi, double tau2, double sigma2) {
             return NormalModelSpec{HyperParams{phi, tau2}, sigma2};
           }),
           py::arg("phi"), py::arg("tau2"), py::arg("sigma2"))
      .def_readwrite("hyper", &NormalModelSpec::hyper)
      .def_readwrite("sigma2", &NormalModelSpec::sigma2);

  py::class_<Posterior>(m, "Posterior")
      .def_readonly("mean", &Posterior::mean)
      .def_readonly("sd", &Posterior::sd);

  py::class_<LinkingModel>(m, "LinkingModel")
      .def(py::init([](double phi, double tau2, double scale2) {
             return LinkingModel{HyperParams{phi, tau2}, scale2};
           }),
           py::arg("phi"), py::arg("tau2"), py::arg("scale2"))
      .def_readwrite("hyper", &LinkingModel::hyper)
      .def_readwrite("scale2", &LinkingModel::scale2);

  py::class_<AcceptanceRegion>(m, "AcceptanceRegion")
      .def_readonly("lo", &AcceptanceRegion::lo)
      .def_readonly("hi", &AcceptanceRegion::hi)
      .def_readonly("w", &AcceptanceRegion::w);

  // grouped data -----------------------------------------------------------
  m.def("read_aggregated_csv", &read_aggregated_file, py::arg("path"));
  m.def(
      "read_raw_csv",
      [](const std::string& path, long min_n) { return summarize(ingest_raw_file(path), min_n); },
      py::arg("path"), py::arg("min_n") = 2);
  m.def(
      "mom_estimate", [](const std::vector<GroupSummary>& s) { return mom_estimate(s); },
      py::arg("summaries"));
  m.def(
      "mle_estimate", [](const std::vector<GroupSummary>& s) { return mle_estimate(s); },
      py::arg("summaries"));
  m.def(
      "loo_hyperparams",
      [](const std::vector<GroupSummary>& s, std::size_t index, const std::string& estimator) {
        return loo_hyperparams(s, index, estimator_from_string(estimator));
      },
      py::arg("summaries"), py::arg("index"), py::arg("estimator") = "mom");

  // eb_normal ----------------------------------------------------------------
  m.def("posterior", &posterior, py::arg("z"), py::arg("spec"));
  m.def("eb_interval", &eb_interval, py::arg("z"), py::arg("spec"), py::arg("alpha") = 0.05);
  m.def("exact_eb_coverage", &exact_eb_coverage, py::arg("mu"), py::arg("spec"),
        py::arg("alpha") = 0.05);
  m.def("prior_predictive_cdf", &prior_predictive_cdf, py::arg("z"), py::arg("spec"));
  m.def("coverage_curve", &coverage_curve, py::arg("spec"), py::arg("alpha"),
        py::arg("mu_grid"));

  // direct ----------------------------------------------------------------
  m.def("umau_z", &umau_z, py::arg("z"), py::arg("sigma"), py::arg("alpha") = 0.05);
  m.def("umau_t", &umau_t, py::arg("summary"), py::arg("alpha") = 0.05);

  // fab ----------------------------------------------------------------------
  m.def("fab_w", &fab_w, py::arg("mu"), py::arg("link"), py::arg("sigma"),
        py::arg("alpha") = 0.05);
  m.def("acceptance_region_z", &acceptance_region_z, py::arg("mu"), py::arg("w"),
        py::arg("sigma"), py::arg("alpha") = 0.05);
  m.def("acceptance_region_t", &acceptance_region_t, py::arg("mu"), py::arg("w"), py::arg("se"),
        py::arg("dof"), py::arg("alpha") = 0.05);
  m.def("fab_interval_z", &fab_interval_z, py::arg("z"), py::arg("sigma"), py::arg("link"),
        py::arg("alpha") = 0.05);
  m.def("fab_interval_t", &fab_interval_t, py::arg("summary"), py::arg("link"),
        py::arg("alpha") = 0.05);
  m.def(
      "fab_all_groups",
      [](const std::vector<GroupSummary>& s, double alpha, const std::string& estimator) {
        return fab_all_groups(s, alpha, estimator_from_string(estimator));
      },
      py::arg("summaries"), py::arg("alpha") = 0.05, py::arg("estimator") = "mom");

  // quantile bound ------------------------------------------------------------
  m.def("posterior_upper_quantile", &posterior_upper_quantile, py::arg("z"), py::arg("spec"),
        py::arg("alpha1"));
  m.def(
      "one_sided_upper",
      [](double z, double sigma2, const std::vector<GroupSummary>& summaries, double alpha,
         double alpha1, long replicates, const std::string& estimator, std::uint64_t seed,
         std::optional<HyperParams> forced_hyper) {
        return one_sided_upper(z, sigma2, summaries, BudgetSplit{alpha, alpha1},
                               make_bootstrap_config(replicates, estimator, seed, forced_hyper));
      },
      py::arg("z"), py::arg("sigma2"), py::arg("summaries"), py::arg("alpha") = 0.05,
      py::arg("alpha1") = 0.025, py::arg("replicates") = 200, py::arg("estimator") = "mom",
      py::arg("seed") = 0, py::arg("forced_hyper") = std::nullopt);
  m.def(
      "two_sided_interval",
      [](double z, double sigma2, const std::vector<GroupSummary>& summaries, double alpha,
         long replicates, const std::string& estimator, std::uint64_t seed,
         std::optional<HyperParams> forced_hyper, double alpha1_side) {
        return two_sided_interval(z, sigma2, summaries, alpha,
                                  make_bootstrap_config(replicates, estimator, seed, forced_hyper),
                                  alpha1_side);
      },
      py::arg("z"), py::arg("sigma2"), py::arg("summaries"), py::arg("alpha") = 0.05,
      py::arg("replicates") = 200, py::arg("estimator") = "mom", py::arg("seed") = 0,
      py::arg("forced_hyper") = std::nullopt, py::arg("alpha1_side") = -1.0);

  // coverage lab ----------------------------------------------------------------
  m.def(
      "simulate_coverage",
      [](const std::string& scenario_json) {
        const auto scenario = scenario_from_json(nlohmann::json::parse(scenario_json));
        return report_to_json(simulate_coverage(scenario)).dump();
      },
      py::arg("scenario_json"),
      "Runs a scenario given as a JSON string; returns the report as a JSON string.");
  m.def("average_coverage_identity_check", &average_coverage_identity_check, py::arg("spec"),
        py::arg("alpha") = 0.05, py::arg("quad_points") = 2001);
  m.def(
      "width_comparison",
      [](const std::vector<GroupSummary>& summaries, double alpha, const std::string& a,
         const std::string& b, const std::string& estimator, std::uint64_t seed,
         long qbound_replicates) {
        const auto wc = width_comparison(summaries, alpha, method_from_string(a),
                                         method_from_string(b),
                                         estimator_from_string(estimator), seed,
                                         qbound_replicates);
        return py::make_tuple(wc.fraction_a_narrower, wc.mean_width_ratio);
      },
      py::arg("summaries"), py::arg("alpha"), py::arg("a"), py::arg("b"),
      py::arg("estimator") = "mom", py::arg("seed") = 0, py::arg("qbound_replicates") = 200);

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
