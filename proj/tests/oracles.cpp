#include "oracles.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace oracle {

namespace {

constexpr long double kSqrtPi = 1.772453850905516027298L;

// Taylor series for erf, accurate for |z| up to ~2.5 in long double.
long double erf_series(long double z) {
  long double term = z;
  long double sum = z;
  const long double z2 = z * z;
  for (int n = 1; n < 200; ++n) {
    term *= -z2 / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
  }
  return sum * 2.0L / kSqrtPi;
}

// Continued fraction for erfc(z), z > 0: erfc(z) * sqrt(pi) * exp(z^2)
//   = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))). Modified Lentz.
long double erfc_cont_frac(long double z) {
  const long double tiny = 1e-300L;
  long double f = z;
  long double c = 1e300L;
  long double d = 1.0L / z;
  f = d;
  for (int k = 1; k < 400; ++k) {
    const long double a = k * 0.5L;
    d = z + a * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = z + a / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0L) < 1e-20L) break;
  }
  return f * std::exp(-z * z) / kSqrtPi;
}

}  // namespace

long double erfc_ld(long double z) {
  if (z < 0.0L) return 2.0L - erfc_ld(-z);
  if (z < 2.5L) return 1.0L - erf_series(z);
  return erfc_cont_frac(z);
}

double norm_cdf(double x) {
  const long double z = -static_cast<long double>(x) * 0.70710678118654752440L;
  return static_cast<double>(0.5L * erfc_ld(z));
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::runtime_error("oracle::bisect: no sign change");
  for (int it = 0; it < 400 && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double norm_quantile(double p) {
  return bisect([p](double x) { return norm_cdf(x) - p; }, -40.0, 40.0, 1e-13);
}

namespace {

long double t_log_norm_const(long double dof) {
  return std::lgamma(0.5L * (dof + 1.0L)) - std::lgamma(0.5L * dof) -
         0.5L * std::log(dof * 3.14159265358979323846L);
}

long double t_density(long double x, long double dof, long double log_c) {
  return std::exp(log_c - 0.5L * (dof + 1.0L) * std::log1p(x * x / dof));
}

// Adaptive Simpson on [a, b] in long double.
long double adaptive_simpson(const std::function<long double(long double)>& f, long double a,
                             long double b, long double fa, long double fb, long double fm,
                             long double whole, long double tol, int depth) {
  const long double m = 0.5L * (a + b);
  const long double lm = 0.5L * (a + m);
  const long double rm = 0.5L * (m + b);
  const long double flm = f(lm);
  const long double frm = f(rm);
  const long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
  const long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0L * tol) {
    return left + right + (left + right - whole) / 15.0L;
  }
  return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5L * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5L * tol, depth - 1);
}

long double integrate(const std::function<long double(long double)>& f, long double a,
                      long double b, long double tol) {
  const long double fa = f(a);
  const long double fb = f(b);
  const long double fm = f(0.5L * (a + b));
  const long double whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
  return adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 48);
}

}  // namespace

double t_cdf(double x, double dof) {
  const long double v = dof;
  const long double log_c = t_log_norm_const(v);
  auto density = [&](long double u) { return t_density(u, v, log_c); };
  const long double ax = std::fabs(static_cast<long double>(x));
  if (ax == 0.0L) return 0.5;
  // Integrate the central part piecewise to keep the adaptive rule honest on
  // long tails.
  long double integral = 0.0L;
  long double start = 0.0L;
  while (start < ax) {
    const long double stop = std::min(ax, start + 8.0L);
    integral += integrate(density, start, stop, 1e-16L);
    start = stop;
  }
  const long double p = 0.5L + (x > 0 ? integral : -integral);
  return static_cast<double>(p);
}

double t_quantile(double p, double dof) {
  double hi = 2.0;
  while (t_cdf(hi, dof) < p && hi < 1e12) hi *= 4.0;
  double lo = -2.0;
  while (t_cdf(lo, dof) > p && lo > -1e12) lo *= 4.0;
  return bisect([&](double x) { return t_cdf(x, dof) - p; }, lo, hi, 1e-11);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace oracle
