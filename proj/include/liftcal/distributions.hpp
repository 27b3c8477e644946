#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "liftcal/random.hpp"

namespace liftcal {

/// Degrees of freedom for Student-t based routines; must be >= 1.
using DegreesOfFreedom = std::int64_t;

/// Regularized incomplete beta I_x(a, b), evaluated by continued fraction.
/// `complement` must equal 1 - x; passing it separately keeps precision when x
/// is close to one.
double regularized_incomplete_beta(double a, double b, double x, double complement);

/// log B(a, b), accurate when one argument is large.
double log_beta(double a, double b);

double t_pdf(double x, DegreesOfFreedom df);
double t_cdf(double x, DegreesOfFreedom df);
/// Inverse of t_cdf; bracketed bisection followed by safeguarded Newton steps.
double t_quantile(double p, DegreesOfFreedom df);

double normal_cdf(double x);
/// Inverse standard normal CDF (Acklam's rational approximation polished by
/// one Halley step against erfc).
double normal_quantile(double p);

enum class NoiseKind { Gaussian, Gumbel };

/// Location-scale noise law. Gumbel uses CDF exp(-exp(-(x - location) / scale)).
struct NoiseFamily {
  NoiseKind kind = NoiseKind::Gaussian;
  double location = 0.0;
  double scale = 1.0;
};

double noise_logpdf(double u, const NoiseFamily& family);
double noise_cdf(double u, const NoiseFamily& family);
double noise_mean(const NoiseFamily& family);
/// One draw from `family` using `stream`; no parameter validation.
double noise_draw(const NoiseFamily& family, RandomStream& stream) noexcept;
std::vector<double> noise_sample(const NoiseFamily& family, std::size_t n, Seed seed);

/// l-infinity radius T with Pr(max(|T1|, |T2|) <= T) = 1 - alpha for the
/// standard bivariate Student-t law (identity scale, shared chi-square mixing).
struct LinfQuantile {
  double value = 0.0;
  double standard_error = 0.0;  // Monte Carlo standard error, in units of T
  std::size_t draws = 0;
};

inline constexpr std::size_t kDefaultLinfDraws = 2'000'000;

LinfQuantile bivariate_t_linf_quantile(double alpha, DegreesOfFreedom df, Seed seed,
                                       std::size_t draws = kDefaultLinfDraws);

}  // namespace liftcal
