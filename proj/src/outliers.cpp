#include "liftcal/outliers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "parallel.hpp"

namespace liftcal {

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// OLS of w on f using precomputed centered design summaries.
struct Design {
  double mean_f = 0.0;
  double sxx = 0.0;
};

void ols(const std::vector<double>& f, const Design& d, std::span<const double> w, double& b0,
         double& b1) {
  const std::size_t n = f.size();
  double mean_w = 0.0;
  for (double v : w) mean_w += v;
  mean_w /= static_cast<double>(n);
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += (f[i] - d.mean_f) * (w[i] - mean_w);
  b1 = sxy / d.sxx;
  b0 = mean_w - b1 * d.mean_f;
}

void collect_support(OutlierSolution& s) {
  s.outlier_indices.clear();
  for (std::size_t i = 0; i < s.gamma.size(); ++i) {
    if (s.gamma[i] != 0.0) s.outlier_indices.push_back(i);
  }
}

// With the support and signs of gamma fixed the problem is a linear system.
// Returns true when its solution satisfies the optimality conditions, in which
// case it replaces the iterate.
bool solve_active_set(const CalibrationSet& calib, OutlierSolution& s) {
  const auto& y = calib.responses();
  const auto& f = calib.predictions();
  const double lambda = s.lambda;
  double m00 = 0.0, m01 = 0.0, m11 = 0.0, r0 = 0.0, r1 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (s.gamma[i] == 0.0) {
      m00 += 1.0;
      m01 += f[i];
      m11 += f[i] * f[i];
      r0 += y[i];
      r1 += f[i] * y[i];
    } else {
      const double sign = s.gamma[i] > 0.0 ? 1.0 : -1.0;
      r0 += lambda * sign;
      r1 += lambda * sign * f[i];
    }
  }
  const double det = m00 * m11 - m01 * m01;
  if (!(m00 >= 2.0) || !(det > 1e-12 * m00 * m11)) return false;
  const double b0 = (m11 * r0 - m01 * r1) / det;
  const double b1 = (m00 * r1 - m01 * r0) / det;
  std::vector<double> gamma(y.size(), 0.0);
  const double slack = lambda * (1.0 + 1e-12) + 1e-12;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - b0 - b1 * f[i];
    if (s.gamma[i] == 0.0) {
      if (std::fabs(r) > slack) return false;
      continue;
    }
    const double sign = s.gamma[i] > 0.0 ? 1.0 : -1.0;
    gamma[i] = r - lambda * sign;
    if (gamma[i] * sign <= 0.0) return false;
  }
  const double objective = outlier_objective(calib, b0, b1, gamma, lambda);
  if (objective > s.objective) return false;
  s.beta0 = b0;
  s.beta1 = b1;
  s.gamma = std::move(gamma);
  s.objective = objective;
  return true;
}

}  // namespace

double soft_threshold(double u, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidParameterError("lambda must be nonnegative");
  const double mag = std::fabs(u) - lambda;
  if (mag <= 0.0) return 0.0;
  return std::copysign(mag, u);
}

WaveletDetail haar_dwt(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2 || !std::has_single_bit(n)) {
    throw ShapeError("Haar transform needs a power-of-two length >= 2, got " + std::to_string(n));
  }
  WaveletDetail out;
  out.coefficients.assign(n, 0.0);
  std::vector<double> approx(x.begin(), x.end());
  for (std::size_t len = n; len >= 2; len /= 2) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const double a = approx[2 * k];
      const double b = approx[2 * k + 1];
      out.coefficients[half + k] = (a - b) / std::numbers::sqrt2;
      approx[k] = (a + b) / std::numbers::sqrt2;
    }
  }
  out.coefficients[0] = approx[0];
  return out;
}

std::vector<double> haar_idwt(const WaveletDetail& w) {
  const std::size_t n = w.coefficients.size();
  if (n < 2 || !std::has_single_bit(n)) {
    throw ShapeError("Haar coefficients need a power-of-two length >= 2, got " +
                     std::to_string(n));
  }
  std::vector<double> approx(n, 0.0);
  approx[0] = w.coefficients[0];
  std::vector<double> next(n);
  for (std::size_t half = 1; half < n; half *= 2) {
    for (std::size_t k = 0; k < half; ++k) {
      const double a = approx[k];
      const double d = w.coefficients[half + k];
      next[2 * k] = (a + d) / std::numbers::sqrt2;
      next[2 * k + 1] = (a - d) / std::numbers::sqrt2;
    }
    std::copy_n(next.begin(), 2 * half, approx.begin());
  }
  return approx;
}

std::size_t largest_pow2(std::size_t n) {
  if (n == 0) throw InvalidParameterError("largest_pow2 needs n >= 1");
  return std::bit_floor(n);
}

std::vector<double> truncate_pow2(std::span<const double> x) {
  const std::size_t m = largest_pow2(x.size());
  return {x.end() - static_cast<std::ptrdiff_t>(m), x.end()};
}

double mad_sigma(std::span<const double> details) {
  if (details.empty()) throw InvalidInputError("MAD of an empty vector is undefined");
  std::vector<double> v(details.begin(), details.end());
  const double med = median_inplace(v);
  for (auto& d : v) d = std::fabs(d - med);
  return median_inplace(v) / 0.6745;
}

double lambda_max(const CalibrationSet& calib, const LiftedFit& fit) {
  if (calib.size() < 4) throw InsufficientDataError("lambda_max needs at least 4 points");
  const auto r = residuals(fit, calib);
  const auto w = haar_dwt(truncate_pow2(r));
  const double sigma = mad_sigma(w.finest());
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(calib.size())));
}

double outlier_objective(const CalibrationSet& calib, double beta0, double beta1,
                         std::span<const double> gamma, double lambda) {
  const auto& y = calib.responses();
  const auto& f = calib.predictions();
  if (gamma.size() != y.size()) throw ShapeError("gamma length differs from the data");
  double rss = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - beta0 - beta1 * f[i] - gamma[i];
    rss += r * r;
    l1 += std::fabs(gamma[i]);
  }
  return 0.5 * rss + lambda * l1;
}

OutlierSolution detect_outliers(const CalibrationSet& calib, double lambda,
                                const BcdOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameterError("lambda must be finite and nonnegative");
  }
  if (!(options.tolerance > 0.0)) throw InvalidParameterError("tolerance must be positive");

  const auto& y = calib.responses();
  const auto& f = calib.predictions();
  const std::size_t n = y.size();

  Design design;
  for (double v : f) design.mean_f += v;
  design.mean_f /= static_cast<double>(n);
  for (double v : f) design.sxx += (v - design.mean_f) * (v - design.mean_f);
  if (!(design.sxx > 0.0)) throw DegenerateDesignError("predictions are constant");

  OutlierSolution s;
  s.lambda = lambda;
  s.gamma.assign(n, 0.0);
  std::vector<double> target(n);

  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) target[i] = y[i] - s.gamma[i];
    double b0 = 0.0, b1 = 0.0;
    ols(f, design, target, b0, b1);

    double change = std::fabs(b0 - s.beta0) + std::fabs(b1 - s.beta1);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = soft_threshold(y[i] - b0 - b1 * f[i], lambda);
      change += std::fabs(g - s.gamma[i]);
      s.gamma[i] = g;
    }
    s.beta0 = b0;
    s.beta1 = b1;
    s.iterations = iter;
    s.objective = outlier_objective(calib, b0, b1, s.gamma, lambda);
    s.objective_trace.push_back(s.objective);

    if (change <= options.tolerance || solve_active_set(calib, s)) {
      if (change <= options.tolerance) solve_active_set(calib, s);
      collect_support(s);
      return s;
    }
  }
  collect_support(s);
  throw OutlierNonConvergence("outlier coordinate descent did not converge in " +
                                  std::to_string(options.max_iterations) + " iterations",
                              std::move(s));
}

LambdaSelection select_lambda(const CalibrationSet& calib, std::size_t grid_size,
                              const BcdOptions& options) {
  return select_lambda(calib, calib, grid_size, options);
}

LambdaSelection select_lambda(const CalibrationSet& calib, const CalibrationSet& reference,
                              std::size_t grid_size, const BcdOptions& options) {
  if (grid_size < 2) throw InvalidParameterError("lambda grid needs at least 2 points");
  const double lmax = lambda_max(reference, fit_lifted_linear(reference));

  LambdaSelection sel;
  sel.grid.resize(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    sel.grid[k] = lmax * static_cast<double>(k) / static_cast<double>(grid_size - 1);
  }
  sel.grid.back() = lmax;

  std::vector<OutlierSolution> solutions(grid_size);
  detail::parallel_for(grid_size, [&](std::size_t k) {
    solutions[k] = detect_outliers(calib, sel.grid[k], options);
  });

  const auto& y = calib.responses();
  const auto& f = calib.predictions();
  const double penalty = lmax * lmax;
  sel.scores.resize(grid_size);
  bool any_inlier = false;
  std::size_t best = grid_size;
  for (std::size_t k = grid_size; k-- > 0;) {
    const auto& s = solutions[k];
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (s.gamma[i] != 0.0) continue;
      const double r = y[i] - s.beta0 - s.beta1 * f[i];
      rss += r * r;
    }
    if (s.outlier_indices.size() < y.size()) any_inlier = true;
    sel.scores[k] = rss + penalty * static_cast<double>(s.outlier_indices.size());
    if (best == grid_size || sel.scores[k] < sel.scores[best]) best = k;
  }
  if (!any_inlier) {
    throw ModelUnsuitableError(
        "every point is flagged at every lambda; the data are corrupted or the model is "
        "unsuitable");
  }
  sel.lambda = sel.grid[best];
  sel.solution = std::move(solutions[best]);
  return sel;
}

}  // namespace liftcal
