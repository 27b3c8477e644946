#include "liftcal/lifted_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "liftcal/error.hpp"

namespace liftcal {

CalibrationSet::CalibrationSet(std::vector<double> responses, std::vector<double> predictions)
    : responses_(std::move(responses)), predictions_(std::move(predictions)) {
  if (responses_.size() != predictions_.size()) {
    throw ShapeError("responses and predictions differ in length (" +
                     std::to_string(responses_.size()) + " vs " +
                     std::to_string(predictions_.size()) + ")");
  }
  if (responses_.size() < 3) {
    throw InsufficientDataError("a calibration set needs at least 3 pairs, got " +
                                std::to_string(responses_.size()));
  }
  for (std::size_t i = 0; i < responses_.size(); ++i) {
    if (!std::isfinite(responses_[i]) || !std::isfinite(predictions_[i])) {
      throw InvalidInputError("non-finite value in calibration pair " + std::to_string(i));
    }
  }
}

LiftedFit fit_lifted_linear(const CalibrationSet& calib) {
  const auto& y = calib.responses();
  const auto& f = calib.predictions();
  const std::size_t n = calib.size();
  const double nd = static_cast<double>(n);

  double mean_y = 0.0;
  double mean_f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_y += y[i];
    mean_f += f[i];
  }
  mean_y /= nd;
  mean_f /= nd;

  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = f[i] - mean_f;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) {
    throw DegenerateDesignError("predictions are constant; the slope is undefined");
  }

  LiftedFit fit;
  fit.n_calb = n;
  fit.mean_y = mean_y;
  fit.mu_hat = mean_f;
  fit.ss_fhat = sxx;
  fit.s_fhat = std::sqrt(sxx / (nd - 1.0));
  fit.s_y = std::sqrt(syy / (nd - 1.0));
  fit.beta1_hat = sxy / sxx;
  fit.beta0_hat = mean_y - fit.beta1_hat * mean_f;
  fit.r_star = syy > 0.0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 0.0;

  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (y[i] - mean_y) - fit.beta1_hat * (f[i] - mean_f);
    rss += r * r;
  }
  fit.sigma_u_hat = std::sqrt(rss / (nd - 2.0));

  fit.cov_scale.a = (sxx + nd * mean_f * mean_f) / (nd * sxx);
  fit.cov_scale.b = -mean_f / sxx;
  fit.cov_scale.c = 1.0 / sxx;
  return fit;
}

std::vector<double> residuals(const LiftedFit& fit, const CalibrationSet& calib) {
  if (calib.size() != fit.n_calb) {
    throw ShapeError("calibration set has " + std::to_string(calib.size()) +
                     " pairs but the fit used " + std::to_string(fit.n_calb));
  }
  const auto& y = calib.responses();
  const auto& f = calib.predictions();
  std::vector<double> r(calib.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = y[i] - fit.beta0_hat - fit.beta1_hat * f[i];
  }
  return r;
}

double consistency_statistic(const LiftedFit& fit) {
  if (fit.n_calb < 4) {
    throw InsufficientDataError("the consistency test needs at least 4 calibration pairs");
  }
  if (!(fit.ss_fhat > 0.0)) throw DegenerateDesignError("predictions are constant");

  // Z^T Z = [[n, n mu], [n mu, SS + n mu^2]] and its symmetric square root.
  const double n = static_cast<double>(fit.n_calb);
  const double mu = fit.mu_hat;
  const double m11 = n;
  const double m12 = n * mu;
  const double m22 = fit.ss_fhat + n * mu * mu;
  const double s = std::sqrt(n * fit.ss_fhat);
  const double t = std::sqrt(m11 + m22 + 2.0 * s);

  const double d0 = fit.beta0_hat;
  const double d1 = fit.beta1_hat - 1.0;
  const double w0 = ((m11 + s) * d0 + m12 * d1) / t;
  const double w1 = (m12 * d0 + (m22 + s) * d1) / t;
  const double norm = std::max(std::fabs(w0), std::fabs(w1));

  if (fit.sigma_u_hat > 0.0) return norm / fit.sigma_u_hat;
  return norm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

ConsistencyTest consistency_test(const LiftedFit& fit, double alpha, double threshold) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameterError("alpha must lie in (0, 1)");
  if (!(threshold >= 0.0) || std::isnan(threshold)) {
    throw InvalidParameterError("threshold must be nonnegative");
  }
  ConsistencyTest test;
  test.alpha = alpha;
  test.threshold = threshold;
  test.statistic = consistency_statistic(fit);
  test.reject = test.statistic > threshold;
  return test;
}

ConsistencyTest consistency_test(const LiftedFit& fit, double alpha, Seed seed,
                                 std::size_t draws) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameterError("alpha must lie in (0, 1)");
  if (fit.n_calb < 4) {
    throw InsufficientDataError("the consistency test needs at least 4 calibration pairs");
  }
  const auto df = static_cast<DegreesOfFreedom>(fit.n_calb - 2);
  const LinfQuantile q = bivariate_t_linf_quantile(alpha, df, seed, draws);
  return consistency_test(fit, alpha, q.value);
}

}  // namespace liftcal
