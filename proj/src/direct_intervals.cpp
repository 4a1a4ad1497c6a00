#include "groupcover/direct_intervals.hpp"

#include <cmath>
#include <sstream>

#include "groupcover/numerics.hpp"

namespace groupcover {

Interval umau_z(double z, double sigma, double alpha) {
  if (!std::isfinite(z)) throw DomainError("umau_z: z must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("umau_z: sigma must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("umau_z: alpha must lie in (0,1)");
  const double q = norm_quantile(1.0 - alpha / 2.0);
  return Interval{z - q * sigma, z + q * sigma, 1.0 - alpha, Method::umau_z};
}

Interval umau_t(const GroupSummary& summary, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("umau_t: alpha must lie in (0,1)");
  if (summary.n < 2) {
    std::ostringstream msg;
    msg << "umau_t: group " << summary.id << " has n = " << summary.n << ", need at least 2";
    throw DataError(msg.str());
  }
  if (!summary.sd || !(*summary.sd > 0.0)) {
    throw DataError("umau_t: group " + summary.id + " needs a positive sample sd");
  }
  const double se = *summary.sd / std::sqrt(static_cast<double>(summary.n));
  const double q = t_quantile(1.0 - alpha / 2.0, static_cast<double>(summary.n - 1));
  return Interval{summary.mean - q * se, summary.mean + q * se, 1.0 - alpha, Method::umau_t};
}

}  // namespace groupcover
