#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "liftcal/distributions.hpp"
#include "liftcal/random.hpp"

namespace liftcal {

/// Paired responses y and model predictions f_hat on held-out data.
/// Validated on construction: equal lengths, n >= 3, finite entries.
class CalibrationSet {
 public:
  CalibrationSet(std::vector<double> responses, std::vector<double> predictions);

  const std::vector<double>& responses() const noexcept { return responses_; }
  const std::vector<double>& predictions() const noexcept { return predictions_; }
  std::size_t size() const noexcept { return responses_.size(); }

 private:
  std::vector<double> responses_;
  std::vector<double> predictions_;
};

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct Sym2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct LiftedFit {
  double beta0_hat = 0.0;
  double beta1_hat = 0.0;
  double r_star = 0.0;       // sample correlation of (y, f_hat)
  double s_y = 0.0;          // (n - 1) divisor
  double s_fhat = 0.0;       // (n - 1) divisor
  double mean_y = 0.0;
  double mu_hat = 0.0;       // mean prediction
  double sigma_u_hat = 0.0;  // sqrt(RSS / (n - 2))
  std::size_t n_calb = 0;
  double ss_fhat = 0.0;      // sum (f_hat - mu_hat)^2
  Sym2 cov_scale;            // (Z^T Z)^{-1}, Z = [1, f_hat]
};

/// Simple OLS of responses on predictions.
LiftedFit fit_lifted_linear(const CalibrationSet& calib);

/// y_i - beta0_hat - beta1_hat * f_hat_i.
std::vector<double> residuals(const LiftedFit& fit, const CalibrationSet& calib);

struct ConsistencyTest {
  double statistic = 0.0;  // +inf when sigma_u_hat = 0 off the null
  double threshold = 0.0;
  double alpha = 0.0;
  bool reject = false;
};

/// Tests H0: (beta0, beta1) = (0, 1). The statistic is the l-infinity norm of
/// (Z^T Z)^{1/2} (beta0_hat, beta1_hat - 1) / sigma_u_hat, compared with the
/// bivariate-t radius on n - 2 degrees of freedom.
ConsistencyTest consistency_test(const LiftedFit& fit, double alpha, Seed seed,
                                 std::size_t draws = kDefaultLinfDraws);

/// Same test with a precomputed threshold (from bivariate_t_linf_quantile).
ConsistencyTest consistency_test(const LiftedFit& fit, double alpha, double threshold);

/// The studentized statistic alone.
double consistency_statistic(const LiftedFit& fit);

}  // namespace liftcal
