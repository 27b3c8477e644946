#include "liftcal/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "liftcal/distributions.hpp"
#include "liftcal/error.hpp"

namespace liftcal {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameterError("alpha must lie in (0, 1)");
}

void require_design(const LiftedFit& fit) {
  if (!(fit.ss_fhat > 0.0)) throw DegenerateDesignError("predictions are constant");
  if (fit.n_calb < 3) throw InsufficientDataError("fit needs at least 3 calibration pairs");
}

double t_critical(const LiftedFit& fit, double alpha) {
  return t_quantile(1.0 - 0.5 * alpha, static_cast<DegreesOfFreedom>(fit.n_calb - 2));
}

Interval make_interval(const LiftedFit& fit, double f0, double alpha, double t_crit) {
  Interval iv;
  iv.center = fit.beta0_hat + fit.beta1_hat * f0;
  const double half = fit.sigma_u_hat * std::sqrt(eta_hat(fit, f0)) * t_crit;
  iv.lower = iv.center - half;
  iv.upper = iv.center + half;
  iv.level = 1.0 - alpha;
  iv.method = IntervalMethod::StudentT;
  return iv;
}

}  // namespace

double eta_hat(const LiftedFit& fit, double f0) {
  require_design(fit);
  const double d = f0 - fit.mu_hat;
  return 1.0 + 1.0 / static_cast<double>(fit.n_calb) + d * d / fit.ss_fhat;
}

Interval prediction_interval(const LiftedFit& fit, double f0, double alpha) {
  require_alpha(alpha);
  require_design(fit);
  if (!std::isfinite(f0)) throw InvalidInputError("prediction f0 must be finite");
  return make_interval(fit, f0, alpha, t_critical(fit, alpha));
}

std::vector<Interval> prediction_intervals(const LiftedFit& fit, std::span<const double> f0,
                                           double alpha) {
  require_alpha(alpha);
  require_design(fit);
  for (double v : f0) {
    if (!std::isfinite(v)) throw InvalidInputError("prediction f0 must be finite");
  }
  const double t_crit = t_critical(fit, alpha);
  std::vector<Interval> out(f0.size());
  std::transform(f0.begin(), f0.end(), out.begin(),
                 [&](double v) { return make_interval(fit, v, alpha, t_crit); });
  return out;
}

double mspe_bound_estimate(const LiftedFit& fit, double f0) {
  return fit.sigma_u_hat * fit.sigma_u_hat * eta_hat(fit, f0);
}

double empirical_coverage(std::span<const Interval> intervals, std::span<const double> y0) {
  if (intervals.size() != y0.size()) {
    throw ShapeError("interval count " + std::to_string(intervals.size()) +
                     " differs from response count " + std::to_string(y0.size()));
  }
  if (intervals.empty()) throw InvalidInputError("coverage of an empty set is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    if (intervals[i].lower <= y0[i] && y0[i] <= intervals[i].upper) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(y0.size());
}

ReliabilityCurve reliability_curve(const LiftedFit& fit, const CalibrationSet& test,
                                   std::span<const double> levels) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] < 1.0)) {
      throw InvalidParameterError("coverage levels must lie in (0, 1)");
    }
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw InvalidParameterError("coverage levels must be strictly ascending");
    }
  }
  ReliabilityCurve curve;
  curve.levels.assign(levels.begin(), levels.end());
  curve.empirical.reserve(levels.size());
  for (double level : levels) {
    const auto ivs = prediction_intervals(fit, test.predictions(), 1.0 - level);
    curve.empirical.push_back(empirical_coverage(ivs, test.responses()));
  }
  return curve;
}

}  // namespace liftcal
