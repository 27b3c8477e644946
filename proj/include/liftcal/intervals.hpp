#pragma once

#include <span>
#include <vector>

#include "liftcal/lifted_fit.hpp"

namespace liftcal {

enum class IntervalMethod { StudentT, Mcmc };

struct Interval {
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;  // 1 - alpha
  IntervalMethod method = IntervalMethod::StudentT;

  double width() const noexcept { return upper - lower; }
};

/// 1 + 1/n + (f0 - mu_hat)^2 / SS, the variance inflation at prediction f0.
double eta_hat(const LiftedFit& fit, double f0);

/// Student-t interval for a new response whose model prediction is f0.
/// Half-width sigma_u_hat * sqrt(eta_hat) * t_{n-2, 1-alpha/2}.
Interval prediction_interval(const LiftedFit& fit, double f0, double alpha);

/// Batch form; the t quantile is computed once.
std::vector<Interval> prediction_intervals(const LiftedFit& fit, std::span<const double> f0,
                                           double alpha);

/// Plug-in estimate sigma_u_hat^2 * eta_hat(f0) of the conditional
/// prediction variance.
double mspe_bound_estimate(const LiftedFit& fit, double f0);

/// Fraction of i with lower_i <= y0_i <= upper_i.
double empirical_coverage(std::span<const Interval> intervals, std::span<const double> y0);

struct ReliabilityCurve {
  std::vector<double> levels;
  std::vector<double> empirical;
};

/// Empirical coverage on `test` at each nominal level (levels in (0,1),
/// ascending).
ReliabilityCurve reliability_curve(const LiftedFit& fit, const CalibrationSet& test,
                                   std::span<const double> levels);

}  // namespace liftcal
