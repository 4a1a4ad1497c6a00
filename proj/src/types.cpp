#include "groupcover/types.hpp"

#include <iostream>
#include <mutex>

namespace groupcover {

namespace {

WarningHandler g_warning_handler = nullptr;
std::mutex g_warning_mutex;

}  // namespace

void set_warning_handler(WarningHandler handler) noexcept {
  std::lock_guard<std::mutex> lock(g_warning_mutex);
  g_warning_handler = handler;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_warning_mutex);
  if (g_warning_handler != nullptr) {
    g_warning_handler(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

std::string to_string(Method m) {
  switch (m) {
    case Method::umau_z: return "umau_z";
    case Method::umau_t: return "umau_t";
    case Method::eb: return "eb";
    case Method::fab_z: return "fab_z";
    case Method::fab_t: return "fab_t";
    case Method::qbound: return "qbound";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "umau_z") return Method::umau_z;
  if (name == "umau_t") return Method::umau_t;
  if (name == "eb") return Method::eb;
  if (name == "fab_z") return Method::fab_z;
  if (name == "fab_t") return Method::fab_t;
  if (name == "qbound") return Method::qbound;
  throw DataError("unknown method tag: " + std::string(name));
}

std::string to_string(Estimator e) {
  return e == Estimator::mom ? "mom" : "mle";
}

Estimator estimator_from_string(std::string_view name) {
  if (name == "mom") return Estimator::mom;
  if (name == "mle") return Estimator::mle;
  throw DataError("unknown estimator: " + std::string(name) + " (expected mom or mle)");
}

double GroupSummary::noise_variance() const {
  if (n < 1) throw DataError("group " + id + ": sample size must be at least 1");
  if (known_sigma) {
    if (!(*known_sigma > 0.0)) throw DataError("group " + id + ": known_sigma must be positive");
    return (*known_sigma) * (*known_sigma) / static_cast<double>(n);
  }
  if (sd) {
    if (!(*sd >= 0.0)) throw DataError("group " + id + ": sd must be nonnegative");
    return (*sd) * (*sd) / static_cast<double>(n);
  }
  throw DataError("group " + id + ": neither sd nor known_sigma is available");
}

}  // namespace groupcover
