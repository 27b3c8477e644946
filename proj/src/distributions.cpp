#include "liftcal/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "liftcal/error.hpp"

namespace liftcal {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kCfEpsilon = 1e-16;
constexpr int kCfMaxIterations = 100000;

double stirling_correction(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

// lgamma(x) - lgamma(x + s) for x >= 10, without the cancellation of the
// naive difference.
double lgamma_difference(double x, double s) {
  return -(x - 0.5) * std::log1p(s / x) - s * std::log(x + s) + s + stirling_correction(x) -
         stirling_correction(x + s);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double m2 = 2.0 * m;
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
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kCfEpsilon) return h;
  }
  throw NonConvergenceError("incomplete beta continued fraction did not converge");
}

void require_df(DegreesOfFreedom df) {
  if (df < 1) {
    throw InvalidParameterError("degrees of freedom must be >= 1, got " + std::to_string(df));
  }
}

void require_open_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidParameterError(std::string(name) + " must lie in (0, 1)");
  }
}

void require_family(const NoiseFamily& family) {
  if (!(family.scale > 0.0) || !std::isfinite(family.scale) || !std::isfinite(family.location)) {
    throw InvalidParameterError("noise family needs finite location and scale > 0");
  }
}

// Pr(T > t) for t >= 0.
double t_upper_tail(double t, double nu) {
  const double t2 = t * t;
  const double denom = nu + t2;
  return 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, nu / denom, t2 / denom);
}

}  // namespace

double log_beta(double a, double b) {
  const double small = std::min(a, b);
  const double big = std::max(a, b);
  if (big < 10.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::lgamma(small) + lgamma_difference(big, small);
}

double regularized_incomplete_beta(double a, double b, double x, double complement) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidParameterError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (complement <= 0.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(complement) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, complement) / b;
}

double t_pdf(double x, DegreesOfFreedom df) {
  require_df(df);
  const double nu = static_cast<double>(df);
  return std::exp(-log_beta(0.5 * nu, 0.5) - 0.5 * std::log(nu) -
                  0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double t_cdf(double x, DegreesOfFreedom df) {
  require_df(df);
  if (std::isnan(x)) throw InvalidParameterError("t_cdf argument is NaN");
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  if (x == 0.0) return 0.5;
  const double tail = t_upper_tail(std::fabs(x), static_cast<double>(df));
  return x > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, DegreesOfFreedom df) {
  require_open_probability(p, "t_quantile probability");
  require_df(df);
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(1.0 - p, df);

  const double target_tail = 1.0 - p;
  if (df == 1) return std::tan(std::numbers::pi * (p - 0.5));
  const double nu = static_cast<double>(df);

  // Bracket the root: tail(lo) > target >= tail(hi).
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * normal_quantile(p));
  while (t_upper_tail(hi, nu) > target_tail) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NonConvergenceError("t_quantile could not bracket the root");
  }
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t_upper_tail(mid, nu) > target_tail ? lo : hi) = mid;
  }

  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 100; ++i) {
    const double excess = t_upper_tail(t, nu) - target_tail;
    if (excess > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t + excess / t_pdf(t, df);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - t);
    t = next;
    if (step <= 1e-14 * std::max(1.0, t)) break;
  }
  return t;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  require_open_probability(p, "normal_quantile probability");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the smaller tail.
  const double e = (x < 0.0) ? normal_cdf(x) - p
                             : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double noise_logpdf(double u, const NoiseFamily& family) {
  require_family(family);
  const double z = (u - family.location) / family.scale;
  switch (family.kind) {
    case NoiseKind::Gaussian:
      return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(family.scale) - 0.5 * z * z;
    case NoiseKind::Gumbel:
      return -std::log(family.scale) - z - std::exp(-z);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double noise_cdf(double u, const NoiseFamily& family) {
  require_family(family);
  const double z = (u - family.location) / family.scale;
  switch (family.kind) {
    case NoiseKind::Gaussian:
      return normal_cdf(z);
    case NoiseKind::Gumbel:
      return std::exp(-std::exp(-z));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double noise_mean(const NoiseFamily& family) {
  require_family(family);
  if (family.kind == NoiseKind::Gumbel) {
    return family.location + std::numbers::egamma * family.scale;
  }
  return family.location;
}

double noise_draw(const NoiseFamily& family, RandomStream& stream) noexcept {
  const double z = family.kind == NoiseKind::Gaussian ? stream.normal() : stream.gumbel();
  return family.location + family.scale * z;
}

std::vector<double> noise_sample(const NoiseFamily& family, std::size_t n, Seed seed) {
  require_family(family);
  RandomStream stream(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = noise_draw(family, stream);
  return out;
}

LinfQuantile bivariate_t_linf_quantile(double alpha, DegreesOfFreedom df, Seed seed,
                                       std::size_t draws) {
  require_open_probability(alpha, "alpha");
  require_df(df);
  if (draws < 100) throw InvalidParameterError("need at least 100 Monte Carlo draws");

  const double nu = static_cast<double>(df);
  RandomStream stream(seed);
  std::vector<double> radii(draws);
  for (auto& r : radii) {
    const double z1 = stream.normal();
    const double z2 = stream.normal();
    const double mixing = std::sqrt(stream.chi_squared(nu) / nu);
    r = std::max(std::fabs(z1), std::fabs(z2)) / mixing;
  }

  // Empirical quantile: smallest order statistic whose ECDF reaches 1 - alpha.
  const double n = static_cast<double>(draws);
  const double level = 1.0 - alpha;
  auto order_stat = [&](double rank) {
    const auto k = static_cast<std::size_t>(std::clamp(rank, 0.0, n - 1.0));
    std::nth_element(radii.begin(), radii.begin() + static_cast<std::ptrdiff_t>(k), radii.end());
    return radii[k];
  };
  const double k = std::ceil(level * n) - 1.0;
  const double spread = std::sqrt(n * level * alpha);

  LinfQuantile result;
  result.draws = draws;
  result.value = order_stat(k);
  // Order-statistic interval one binomial standard deviation either side.
  const double upper = order_stat(std::ceil(k + spread));
  const double lower = order_stat(std::floor(k - spread));
  result.standard_error = 0.5 * (upper - lower);
  return result;
}

}  // namespace liftcal
