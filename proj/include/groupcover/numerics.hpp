#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "groupcover/errors.hpp"

namespace groupcover {

// Shared tolerances for the root finder and the scalar minimizer. abs_tol is
// also the accuracy target for CDF/quantile roundtrips.
struct ToleranceConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;

  void validate() const;
};

// Standard normal density, CDF, and inverse CDF.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

// Student-t density, CDF (via the regularized incomplete beta function), and
// inverse CDF. dof may be any positive real.
double t_pdf(double x, double dof);
double t_cdf(double x, double dof);
double t_quantile(double p, double dof);

namespace detail {

[[noreturn]] void throw_root_domain(double lo, double hi);
[[noreturn]] void throw_bracket_error(double lo, double hi, double flo, double fhi);
[[noreturn]] void throw_root_eval(double x);
[[noreturn]] void throw_root_convergence(double best);
[[noreturn]] void throw_minimize_domain(double lo, double hi, int grid_points);
[[noreturn]] void throw_minimize_eval(double x);

}  // namespace detail

// Finds a root of f on [lo, hi] with a safeguarded secant/bisection hybrid.
// Requires f(lo) * f(hi) <= 0. Stops when |f(x)| <= abs_tol or the bracket
// width drops below rel_tol * |x| + abs_tol.
template <class F>
double find_root(F&& f, double lo, double hi, ToleranceConfig tol = {}) {
  tol.validate();
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
    detail::throw_root_domain(lo, hi);
  }
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa)) detail::throw_root_eval(a);
  if (!std::isfinite(fb)) detail::throw_root_eval(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) detail::throw_bracket_error(lo, hi, fa, fb);

  double best = std::fabs(fa) <= std::fabs(fb) ? a : b;
  double fbest = std::fabs(fa) <= std::fabs(fb) ? fa : fb;
  double prev_width = b - a;
  for (int it = 0; it < tol.max_iter; ++it) {
    const double width = b - a;
    const double mid = 0.5 * (a + b);
    if (width <= tol.rel_tol * std::fabs(mid) + tol.abs_tol) return mid;

    // Secant step, falling back to bisection when the step leaves the
    // bracket or the bracket has stopped shrinking fast enough.
    double x = mid;
    if (fb != fa) {
      const double s = b - fb * (b - a) / (fb - fa);
      if (s > a && s < b && width <= 0.75 * prev_width) x = s;
    }
    prev_width = width;

    const double fx = f(x);
    if (!std::isfinite(fx)) detail::throw_root_eval(x);
    if (std::fabs(fx) < std::fabs(fbest)) {
      best = x;
      fbest = fx;
    }
    if (std::fabs(fx) <= tol.abs_tol) return x;
    if (fa * fx <= 0.0) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
  }
  detail::throw_root_convergence(best);
}

struct MinimizeResult {
  double argmin = 0.0;
  double min_value = 0.0;
};

// Minimizes f on [lo, hi]: a scan over grid_points equally spaced points
// picks the best cell, then golden-section refinement narrows it down. The
// grid pass guards against non-unimodal objectives. Deterministic; returns
// the best point evaluated anywhere.
template <class F>
MinimizeResult minimize_scalar(F&& f, double lo, double hi, int grid_points = 41,
                               ToleranceConfig tol = {}) {
  tol.validate();
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi) || grid_points < 3) {
    detail::throw_minimize_domain(lo, hi, grid_points);
  }
  MinimizeResult best{lo, 0.0};
  bool have_best = false;
  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) detail::throw_minimize_eval(x);
    if (!have_best || v < best.min_value) {
      best = {x, v};
      have_best = true;
    }
    return v;
  };

  const double step = (hi - lo) / (grid_points - 1);
  int best_idx = 0;
  double best_grid = eval(lo);
  for (int i = 1; i < grid_points; ++i) {
    const double x = (i == grid_points - 1) ? hi : lo + i * step;
    const double v = eval(x);
    if (v < best_grid) {
      best_grid = v;
      best_idx = i;
    }
  }

  double a = (best_idx == 0) ? lo : lo + (best_idx - 1) * step;
  double b = (best_idx == grid_points - 1) ? hi : lo + (best_idx + 1) * step;
  const double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  for (int it = 0; it < tol.max_iter; ++it) {
    if (b - a <= tol.rel_tol * std::fabs(0.5 * (a + b)) + tol.abs_tol) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

// Counter-based random stream. A stream is fully identified by
// (master_seed, stream_index): equal pairs replay the same sequence, and
// distinct indices give statistically independent streams (each stream walks
// its own odd Weyl increment derived by 64-bit avalanche mixing, SplitMix
// style). Normal draws go through the inverse CDF, so the sequence is
// platform independent.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return index_; }

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;  // strictly inside (0, 1)
  double normal();            // N(0, 1)
  double normal(double mean, double sd);

  // Child stream for (rep, replicate, group...) fan-out. Depends only on the
  // parent identity and the key, never on the parent's position, so parallel
  // and sequential assignment agree.
  RngStream split(std::uint64_t key) const noexcept;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
  std::uint64_t state_ = 0;
  std::uint64_t gamma_ = 1;
};

}  // namespace groupcover
