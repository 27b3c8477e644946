#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "liftcal/error.hpp"
#include "liftcal/lifted_fit.hpp"

namespace liftcal {

/// sign(u) * max(|u| - lambda, 0).
double soft_threshold(double u, double lambda);

/// Orthonormal Haar analysis of a length-2^J signal.
/// Layout: [approximation, coarsest details, ..., finest details]; the finest
/// level occupies the last 2^(J-1) entries, d_k = (x_2k - x_2k+1) / sqrt(2).
struct WaveletDetail {
  std::vector<double> coefficients;

  std::span<const double> finest() const noexcept {
    return std::span<const double>(coefficients).subspan(coefficients.size() / 2);
  }
};

WaveletDetail haar_dwt(std::span<const double> x);
std::vector<double> haar_idwt(const WaveletDetail& w);

/// Largest power of two <= n (n >= 1).
std::size_t largest_pow2(std::size_t n);
/// The last largest_pow2(size) entries of x.
std::vector<double> truncate_pow2(std::span<const double> x);

/// median(|d - median(d)|) / 0.6745.
double mad_sigma(std::span<const double> details);

/// sigma_MAD * sqrt(2 ln n), sigma_MAD from the finest Haar details of the
/// lifted residuals (last power-of-two block).
double lambda_max(const CalibrationSet& calib, const LiftedFit& fit);

struct BcdOptions {
  double tolerance = 1e-6;  // l1 change in (beta0, beta1, gamma)
  std::size_t max_iterations = 10000;
};

/// Minimizer of 0.5 * sum (y - beta0 - beta1 f_hat - gamma)^2 + lambda * |gamma|_1.
struct OutlierSolution {
  double beta0 = 0.0;
  double beta1 = 0.0;
  std::vector<double> gamma;
  double lambda = 0.0;
  std::size_t iterations = 0;
  double objective = 0.0;
  std::vector<std::size_t> outlier_indices;  // gamma_i != 0
  std::vector<double> objective_trace;       // after every sweep
};

class OutlierNonConvergence : public NonConvergenceError {
 public:
  OutlierNonConvergence(const std::string& what, OutlierSolution last)
      : NonConvergenceError(what), last_(std::move(last)) {}
  const OutlierSolution& last_iterate() const noexcept { return last_; }

 private:
  OutlierSolution last_;
};

double outlier_objective(const CalibrationSet& calib, double beta0, double beta1,
                         std::span<const double> gamma, double lambda);

/// Block coordinate descent: OLS of (y - gamma) on f_hat, then
/// gamma <- soft_threshold(residual, lambda), until the l1 change is below
/// the tolerance.
OutlierSolution detect_outliers(const CalibrationSet& calib, double lambda,
                                const BcdOptions& options = {});

struct LambdaSelection {
  double lambda = 0.0;
  OutlierSolution solution;
  std::vector<double> grid;
  std::vector<double> scores;
};

/// Even grid over [0, lambda_max]. Each lambda is scored by the inlier
/// residual sum of squares plus lambda_max^2 per flagged point; the lowest
/// score wins, ties toward larger lambda.
LambdaSelection select_lambda(const CalibrationSet& calib, std::size_t grid_size = 50,
                              const BcdOptions& options = {});

/// Same, with lambda_max taken from the lifted residuals of a reference
/// calibration set, for scanning out-of-sample points.
LambdaSelection select_lambda(const CalibrationSet& data, const CalibrationSet& reference,
                              std::size_t grid_size = 50, const BcdOptions& options = {});

}  // namespace liftcal
