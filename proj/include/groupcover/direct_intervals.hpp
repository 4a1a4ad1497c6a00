#pragma once

#include "groupcover/types.hpp"

namespace groupcover {

// UMAU interval for a normal mean with known sigma: z +/- z_{1-alpha/2} * sigma.
Interval umau_z(double z, double sigma, double alpha);

// Direct t-interval from a group's own data: mean +/- t_{1-alpha/2, n-1} * sd / sqrt(n).
Interval umau_t(const GroupSummary& summary, double alpha);

}  // namespace groupcover
