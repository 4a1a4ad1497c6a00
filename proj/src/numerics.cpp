#include "groupcover/numerics.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace groupcover {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;

// Acklam's rational approximation to the normal quantile (|rel err| < 1.2e-9),
// used as the initial guess before Newton polish.
double norm_quantile_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Lentz's continued fraction for the regularized incomplete beta function.
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge", h);
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_pre = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
  const double pre = std::exp(ln_pre);
  if (x < (a + 1.0) / (a + b + 2.0)) return pre * beta_cont_frac(a, b, x) / a;
  return 1.0 - pre * beta_cont_frac(b, a, 1.0 - x) / b;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    std::ostringstream msg;
    msg << what << ": argument must be finite, got " << x;
    throw DomainError(msg.str());
  }
}

}  // namespace

void ToleranceConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1) {
    throw DomainError("ToleranceConfig: tolerances must be positive and max_iter >= 1");
  }
}

double norm_pdf(double x) {
  require_finite(x, "norm_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
  require_finite(x, "norm_cdf");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << "norm_quantile: p must lie in (0,1), got " << p;
    throw DomainError(msg.str());
  }
  double x = norm_quantile_seed(p);
  // Two Newton steps against the erfc-based CDF push the seed to full double
  // accuracy; skip them where the density underflows.
  for (int k = 0; k < 2; ++k) {
    const double density = norm_pdf(x);
    if (!(density > 0.0)) break;
    x -= (norm_cdf(x) - p) / density;
  }
  return x;
}

double t_pdf(double x, double dof) {
  if (!(dof > 0.0) || !std::isfinite(dof)) throw DomainError("t_pdf: dof must be positive");
  require_finite(x, "t_pdf");
  const double ln = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                    0.5 * std::log(dof * M_PI) -
                    0.5 * (dof + 1.0) * std::log1p(x * x / dof);
  return std::exp(ln);
}

double t_cdf(double x, double dof) {
  if (!(dof > 0.0) || !std::isfinite(dof)) throw DomainError("t_cdf: dof must be positive");
  require_finite(x, "t_cdf");
  if (x == 0.0) return 0.5;
  const double xb = dof / (dof + x * x);
  const double tail = 0.5 * reg_inc_beta(0.5 * dof, 0.5, xb);
  return x > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double dof) {
  if (!(dof > 0.0) || !std::isfinite(dof)) throw DomainError("t_quantile: dof must be positive");
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << "t_quantile: p must lie in (0,1), got " << p;
    throw DomainError(msg.str());
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(1.0 - p, dof);

  double hi = 2.0;
  while (t_cdf(hi, dof) < p) {
    hi *= 4.0;
    if (hi > 1e300) throw ConvergenceError("t_quantile: bracket expansion failed", hi);
  }
  return find_root([&](double x) { return t_cdf(x, dof) - p; }, 0.0, hi);
}

namespace detail {

void throw_root_domain(double lo, double hi) {
  std::ostringstream msg;
  msg << "find_root: invalid bracket [" << lo << ", " << hi << "]";
  throw DomainError(msg.str());
}

void throw_bracket_error(double lo, double hi, double flo, double fhi) {
  std::ostringstream msg;
  msg << "find_root: no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", " << fhi
      << ")";
  throw BracketError(msg.str());
}

void throw_root_eval(double x) {
  std::ostringstream msg;
  msg << "find_root: function evaluated to a non-finite value at x = " << x;
  throw EvalError(msg.str());
}

void throw_root_convergence(double best) {
  std::ostringstream msg;
  msg << "find_root: max_iter exceeded; best iterate " << best;
  throw ConvergenceError(msg.str(), best);
}

void throw_minimize_domain(double lo, double hi, int grid_points) {
  std::ostringstream msg;
  msg << "minimize_scalar: invalid domain [" << lo << ", " << hi << "] or grid_points "
      << grid_points;
  throw DomainError(msg.str());
}

void throw_minimize_eval(double x) {
  std::ostringstream msg;
  msg << "minimize_scalar: objective evaluated to a non-finite value at x = " << x;
  throw EvalError(msg.str());
}

}  // namespace detail

namespace {

// SplitMix-style 64-bit finalizers.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t mix64_variant(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : seed_(master_seed), index_(stream_index) {
  state_ = mix64(master_seed + kGolden * (stream_index + 1));
  gamma_ = mix64_variant(master_seed ^ (0xd1b54a32d192ed03ULL * stream_index + kGolden)) | 1ULL;
}

std::uint64_t RngStream::next_u64() noexcept {
  state_ += gamma_;
  return mix64(state_);
}

double RngStream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return norm_quantile(uniform()); }

double RngStream::normal(double mean, double sd) { return mean + sd * normal(); }

RngStream RngStream::split(std::uint64_t key) const noexcept {
  const std::uint64_t child = mix64(index_ + kGolden) ^ mix64_variant(key + 0x632be59bd9b4e019ULL);
  return RngStream(seed_, child);
}

}  // namespace groupcover
