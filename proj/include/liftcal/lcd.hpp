#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liftcal/lifted_fit.hpp"

namespace liftcal {

/// Identity: y ~ N(eta, .), covariate f_hat.
/// Logit: y in {0,1}, covariate logit(f_hat) with f_hat clipped to
///        [1e-12, 1 - 1e-12].
/// Log:   y Poisson counts, covariate log(f_hat), f_hat > 0.
enum class Link { Identity, Logit, Log };

enum class NullKind { UniformBinary, InterceptMle };

/// UniformBinary for Logit, InterceptMle otherwise.
NullKind default_null(Link link) noexcept;

inline constexpr double kProbabilityClip = 1e-12;
inline constexpr double kLinearPredictorCap = 30.0;

struct GlmFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double loss = 0.0;
  bool converged = false;  // false also when the linear predictor hit the cap
  int iterations = 0;
};

/// Link-transformed covariate g(f_hat); validates the prediction domain.
std::vector<double> link_covariate(std::span<const double> predictions, Link link);

/// Negative log-likelihood of the lifted GLM at (beta0, beta1). Identity uses
/// the plain sum of squares; Log includes lgamma(y + 1), so every loss is >= 0.
double lifted_loss(const CalibrationSet& calib, Link link, double beta0, double beta1);

/// Newton-Raphson with step halving from the best of (0, 1), the null
/// parameters and (0, 0).
GlmFit fit_lifted_glm(const CalibrationSet& calib, Link link);

double null_loss(const CalibrationSet& calib, Link link, NullKind kind);

struct LcdReport {
  std::string model_id;
  std::optional<double> lcd;  // absent when the model could not be scored
  double model_loss = 0.0;
  double null_loss = 0.0;
  GlmFit lift;
  std::string error;
};

/// 1 - L(model) / L(null). A constant covariate is scored with the
/// intercept-only fit.
LcdReport lcd(const CalibrationSet& calib, Link link, NullKind null_kind,
              std::string model_id = {});

/// Likelihood-ratio variant 1 - exp(2 (L_model - L_null) / n).
double nagelkerke_lcd(double model_loss, double null_loss, std::size_t n);

struct ModelPredictions {
  std::string label;
  std::vector<double> predictions;
};

/// Reports in ascending LCD order, ties by label. Models that fail are kept,
/// with lcd absent and the error text set, and sort first.
std::vector<LcdReport> rank_models(std::span<const double> responses,
                                   std::span<const ModelPredictions> models, Link link,
                                   NullKind null_kind);

struct MicScore {
  std::string model_id;
  double loss = 0.0;
  double complexity = 0.0;
  double mic = 0.0;
};

MicScore mic(double loss, double complexity, std::string model_id = {});
double aic_complexity(std::size_t n_params);
double bic_complexity(std::size_t n_params, std::size_t n_obs);

/// Softmax of -MIC/2.
std::vector<double> mic_probabilities(std::span<const MicScore> scores);

/// Column-wise convex combination of the rows of an m x n prediction matrix.
std::vector<double> committee_predict(std::span<const std::vector<double>> predictions,
                                      std::span<const double> weights);

}  // namespace liftcal
