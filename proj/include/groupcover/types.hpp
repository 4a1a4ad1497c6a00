#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groupcover/errors.hpp"

namespace groupcover {

// Interval construction methods understood throughout the library.
enum class Method { umau_z, umau_t, eb, fab_z, fab_t, qbound };

std::string to_string(Method m);
Method method_from_string(std::string_view name);

// Hyperparameter estimators for the normal linking model.
enum class Estimator { mom, mle };

std::string to_string(Estimator e);
Estimator estimator_from_string(std::string_view name);

// A two-sided interval with its nominal level and provenance tag.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;  // nominal coverage 1 - alpha
  Method method = Method::umau_z;

  double width() const noexcept { return upper - lower; }
  bool contains(double mu) const noexcept { return lower <= mu && mu <= upper; }
};

// Raw per-group measurements.
struct GroupObservations {
  std::string id;
  std::vector<double> values;
};

// Per-group sufficient statistics. `sd` is the within-group sample standard
// deviation (n-1 denominator, defined only for n >= 2); `known_sigma` is the
// per-observation sigma when it is treated as known. Downstream code uses
// exactly one of the two.
struct GroupSummary {
  std::string id;
  long n = 0;
  double mean = 0.0;
  std::optional<double> sd;
  std::optional<double> known_sigma;

  // Sampling variance of the group mean: known_sigma^2/n when sigma is
  // known, sd^2/n otherwise. DataError when neither is available.
  double noise_variance() const;
};

// Across-group normal linking parameters.
struct HyperParams {
  double phi = 0.0;
  double tau2 = 0.0;
};

}  // namespace groupcover
