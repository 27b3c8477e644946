#include "liftcal/lcd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "liftcal/error.hpp"

namespace liftcal {

namespace {

constexpr int kMaxNewtonIterations = 100;
constexpr int kMaxHalvings = 60;
constexpr double kGradientTolerance = 1e-10;
constexpr double kStepTolerance = 1e-6;

struct Pointwise {
  double loss;
  double d1;
  double d2;
  bool capped;
};

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Pointwise pointwise(Link link, double y, double eta) {
  switch (link) {
    case Link::Identity: {
      const double r = y - eta;
      return {r * r, -2.0 * r, 2.0, false};
    }
    case Link::Logit: {
      const bool capped = std::fabs(eta) >= kLinearPredictorCap;
      const double e = std::clamp(eta, -kLinearPredictorCap, kLinearPredictorCap);
      const double p = 1.0 / (1.0 + std::exp(-e));
      const double loss = softplus(e) - y * e;
      if (capped) return {loss, 0.0, 0.0, true};
      return {loss, p - y, p * (1.0 - p), false};
    }
    case Link::Log: {
      const bool capped = std::fabs(eta) >= kLinearPredictorCap;
      const double e = std::clamp(eta, -kLinearPredictorCap, kLinearPredictorCap);
      const double mu = std::exp(e);
      const double loss = mu - y * e + std::lgamma(y + 1.0);
      if (capped) return {loss, 0.0, 0.0, true};
      return {loss, mu - y, mu, false};
    }
  }
  return {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, false};
}

void validate_responses(std::span<const double> y, Link link) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (link == Link::Logit && y[i] != 0.0 && y[i] != 1.0) {
      throw InvalidInputError("logit link needs binary responses; row " + std::to_string(i) +
                              " is " + std::to_string(y[i]));
    }
    if (link == Link::Log && (y[i] < 0.0 || y[i] != std::floor(y[i]))) {
      throw InvalidInputError("log link needs nonnegative integer responses; row " +
                              std::to_string(i) + " is " + std::to_string(y[i]));
    }
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sum of pointwise losses at eta_i = b0 + b1 * (x_i - shift).
double total_loss(std::span<const double> y, std::span<const double> x, Link link, double b0,
                  double b1, double shift) {
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sum += pointwise(link, y[i], b0 + b1 * (x[i] - shift)).loss;
  }
  return sum;
}

std::optional<double> intercept_mle(Link link, double ybar) {
  switch (link) {
    case Link::Identity:
      return ybar;
    case Link::Logit:
      if (ybar <= 0.0 || ybar >= 1.0) return std::nullopt;
      return std::log(ybar / (1.0 - ybar));
    case Link::Log:
      if (ybar <= 0.0) return std::nullopt;
      return std::log(ybar);
  }
  return std::nullopt;
}

GlmFit intercept_only(std::span<const double> y, std::span<const double> x, Link link) {
  GlmFit fit;
  const double ybar = mean(y);
  if (auto b0 = intercept_mle(link, ybar)) {
    fit.beta0 = *b0;
    fit.converged = true;
  } else {
    // Boundary MLE; pin to the cap.
    fit.beta0 = (link == Link::Logit && ybar >= 1.0) ? kLinearPredictorCap : -kLinearPredictorCap;
    fit.converged = false;
  }
  fit.loss = total_loss(y, x, link, fit.beta0, 0.0, 0.0);
  return fit;
}

GlmFit newton_fit(std::span<const double> y, std::span<const double> x, Link link) {
  const std::size_t n = y.size();
  const double xbar = mean(x);
  double x_scale = 0.0;
  for (double v : x) x_scale = std::max(x_scale, std::fabs(v - xbar));

  // Work in centered coordinates eta = c0 + b1 (x - xbar).
  std::vector<std::pair<double, double>> starts = {{xbar, 1.0}, {0.0, 0.0}};
  if (auto b0 = intercept_mle(link, mean(y))) starts.emplace_back(*b0, 0.0);

  double c0 = 0.0;
  double b1 = 0.0;
  double loss = std::numeric_limits<double>::infinity();
  for (const auto& [sc0, sb1] : starts) {
    const double l = total_loss(y, x, link, sc0, sb1, xbar);
    if (l < loss) {
      loss = l;
      c0 = sc0;
      b1 = sb1;
    }
  }

  GlmFit fit;
  bool small_gradient = false;
  int iter = 0;
  for (; iter < kMaxNewtonIterations; ++iter) {
    double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xc = x[i] - xbar;
      const Pointwise p = pointwise(link, y[i], c0 + b1 * xc);
      g0 += p.d1;
      g1 += p.d1 * xc;
      h00 += p.d2;
      h01 += p.d2 * xc;
      h11 += p.d2 * xc * xc;
    }
    const bool flat = std::max(std::fabs(g0), std::fabs(g1)) <= kGradientTolerance;
    if (flat && h00 == 0.0) {
      small_gradient = true;
      break;
    }

    double det = h00 * h11 - h01 * h01;
    if (!(h00 > 0.0) || !(det > 1e-14 * h00 * h11)) {
      const double ridge = 1e-8 * (h00 + h11) + 1e-12;
      h00 += ridge;
      h11 += ridge;
      det = h00 * h11 - h01 * h01;
    }
    const double s0 = -(h11 * g0 - h01 * g1) / det;
    const double s1 = -(h00 * g1 - h01 * g0) / det;
    const double decrement = -(g0 * s0 + g1 * s1);
    // A small gradient with a long Newton step is an infimum at infinity.
    if (flat && std::max(std::fabs(s0), std::fabs(s1) * x_scale) <= kStepTolerance) {
      small_gradient = true;
      break;
    }

    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
      const double trial = total_loss(y, x, link, c0 + t * s0, b1 + t * s1, xbar);
      if (trial < loss) {
        c0 += t * s0;
        b1 += t * s1;
        loss = trial;
        moved = true;
        break;
      }
    }
    // Predicted gain below rounding of the loss itself: nothing left to do.
    if (!moved || decrement <= 1e-15 * std::max(1.0, std::fabs(loss))) {
      small_gradient = decrement <= 1e-12 * std::max(1.0, std::fabs(loss));
      ++iter;
      break;
    }
  }

  bool any_capped = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (pointwise(link, y[i], c0 + b1 * (x[i] - xbar)).capped) {
      any_capped = true;
      break;
    }
  }

  fit.beta1 = b1;
  fit.beta0 = c0 - b1 * xbar;
  fit.loss = loss;
  fit.iterations = iter;
  fit.converged = small_gradient && !any_capped;
  return fit;
}

void require_nonconstant(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (!(*hi > *lo)) {
    throw DegenerateDesignError("link-transformed predictions are constant");
  }
}

}  // namespace

NullKind default_null(Link link) noexcept {
  return link == Link::Logit ? NullKind::UniformBinary : NullKind::InterceptMle;
}

std::vector<double> link_covariate(std::span<const double> predictions, Link link) {
  std::vector<double> x(predictions.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = predictions[i];
    switch (link) {
      case Link::Identity:
        x[i] = f;
        break;
      case Link::Logit: {
        if (!(f >= 0.0 && f <= 1.0)) {
          throw InvalidInputError("logit link needs predictions in [0, 1]; row " +
                                  std::to_string(i) + " is " + std::to_string(f));
        }
        const double p = std::clamp(f, kProbabilityClip, 1.0 - kProbabilityClip);
        x[i] = std::log(p) - std::log1p(-p);
        break;
      }
      case Link::Log:
        if (!(f > 0.0)) {
          throw InvalidInputError("log link needs positive predictions; row " +
                                  std::to_string(i) + " is " + std::to_string(f));
        }
        x[i] = std::log(f);
        break;
    }
  }
  return x;
}

double lifted_loss(const CalibrationSet& calib, Link link, double beta0, double beta1) {
  validate_responses(calib.responses(), link);
  const auto x = link_covariate(calib.predictions(), link);
  return total_loss(calib.responses(), x, link, beta0, beta1, 0.0);
}

GlmFit fit_lifted_glm(const CalibrationSet& calib, Link link) {
  validate_responses(calib.responses(), link);
  const auto x = link_covariate(calib.predictions(), link);
  require_nonconstant(x);
  return newton_fit(calib.responses(), x, link);
}

double null_loss(const CalibrationSet& calib, Link link, NullKind kind) {
  const auto& y = calib.responses();
  validate_responses(y, link);
  const std::vector<double> zeros(y.size(), 0.0);
  if (kind == NullKind::UniformBinary) {
    if (link != Link::Logit) {
      throw InvalidParameterError("the uniform binary null applies to the logit link only");
    }
    return total_loss(y, zeros, link, 0.0, 0.0, 0.0);
  }
  const double ybar = mean(y);
  const auto b0 = intercept_mle(link, ybar);
  if (!b0) {
    if (link == Link::Logit) {
      throw BoundaryError("all responses share one class; use the uniform binary null");
    }
    return 0.0;  // Log link with all-zero counts: the limit of the NLL
  }
  return total_loss(y, zeros, link, *b0, 0.0, 0.0);
}

LcdReport lcd(const CalibrationSet& calib, Link link, NullKind null_kind, std::string model_id) {
  LcdReport report;
  report.model_id = std::move(model_id);
  report.null_loss = null_loss(calib, link, null_kind);
  if (!(report.null_loss > 0.0)) {
    throw UndefinedLcdError("null loss is zero; LCD is undefined");
  }
  const auto x = link_covariate(calib.predictions(), link);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  report.lift = (*hi > *lo) ? newton_fit(calib.responses(), x, link)
                            : intercept_only(calib.responses(), x, link);
  report.model_loss = report.lift.loss;
  report.lcd = 1.0 - report.model_loss / report.null_loss;
  return report;
}

double nagelkerke_lcd(double model_loss, double null_loss, std::size_t n) {
  if (n == 0) throw InvalidParameterError("n must be positive");
  return 1.0 - std::exp(2.0 * (model_loss - null_loss) / static_cast<double>(n));
}

std::vector<LcdReport> rank_models(std::span<const double> responses,
                                   std::span<const ModelPredictions> models, Link link,
                                   NullKind null_kind) {
  if (models.empty()) throw InvalidInputError("rank_models needs at least one model");
  std::vector<LcdReport> reports;
  reports.reserve(models.size());
  for (const auto& model : models) {
    try {
      if (model.predictions.size() != responses.size()) {
        throw ShapeError("model '" + model.label + "' has " +
                         std::to_string(model.predictions.size()) + " predictions for " +
                         std::to_string(responses.size()) + " responses");
      }
      CalibrationSet calib(std::vector<double>(responses.begin(), responses.end()),
                           model.predictions);
      reports.push_back(lcd(calib, link, null_kind, model.label));
    } catch (const Error& e) {
      LcdReport failed;
      failed.model_id = model.label;
      failed.error = e.what();
      reports.push_back(std::move(failed));
    }
  }
  std::stable_sort(reports.begin(), reports.end(), [](const LcdReport& a, const LcdReport& b) {
    if (a.lcd.has_value() != b.lcd.has_value()) return !a.lcd.has_value();
    if (a.lcd && *a.lcd != *b.lcd) return *a.lcd < *b.lcd;
    return a.model_id < b.model_id;
  });
  return reports;
}

MicScore mic(double loss, double complexity, std::string model_id) {
  if (!(complexity >= 0.0)) throw InvalidParameterError("complexity must be nonnegative");
  return {std::move(model_id), loss, complexity, loss + complexity};
}

double aic_complexity(std::size_t n_params) { return 2.0 * static_cast<double>(n_params); }

double bic_complexity(std::size_t n_params, std::size_t n_obs) {
  if (n_obs == 0) throw InvalidParameterError("BIC needs at least one observation");
  return static_cast<double>(n_params) * std::log(static_cast<double>(n_obs));
}

std::vector<double> mic_probabilities(std::span<const MicScore> scores) {
  if (scores.empty()) throw InvalidInputError("need at least one MIC score");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : scores) {
    if (!std::isfinite(s.mic)) throw InvalidInputError("MIC values must be finite");
    best = std::min(best, s.mic);
  }
  std::vector<double> w(scores.size());
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(-0.5 * (scores[k].mic - best));
    total += w[k];
  }
  for (auto& v : w) v /= total;
  return w;
}

std::vector<double> committee_predict(std::span<const std::vector<double>> predictions,
                                      std::span<const double> weights) {
  if (predictions.empty()) throw InvalidInputError("committee needs at least one model");
  if (predictions.size() != weights.size()) {
    throw ShapeError("got " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(predictions.size()) + " models");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidParameterError("committee weights must be nonnegative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw InvalidParameterError("committee weights must sum to 1");

  const std::size_t n = predictions.front().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    if (predictions[k].size() != n) throw ShapeError("prediction rows differ in length");
    for (std::size_t i = 0; i < n; ++i) out[i] += weights[k] * predictions[k][i];
  }
  // Rounding can push a combination of equal values a hair outside the hull.
  for (std::size_t i = 0; i < n; ++i) {
    double lo = predictions[0][i], hi = predictions[0][i];
    for (const auto& row : predictions) {
      lo = std::min(lo, row[i]);
      hi = std::max(hi, row[i]);
    }
    out[i] = std::clamp(out[i], lo, hi);
  }
  return out;
}

}  // namespace liftcal
