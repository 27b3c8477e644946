#include "liftcal/synth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "liftcal/error.hpp"
#include "parallel.hpp"

namespace liftcal {

double doppler(double z, const DopplerParams& p) {
  const double denom = z + p.c;
  if (denom == 0.0) throw SingularityError("doppler is singular at z = -c");
  const double az = std::fabs(z);
  const double envelope = std::sqrt(az * std::max(0.0, 1.0 - az));
  return p.a * envelope * std::sin(p.b * std::numbers::pi / denom);
}

double damped_cosine(double z1, double z2, const DampedCosineParams& p) {
  const double r = std::hypot(z1 - p.c1, z2 - p.c2);
  return p.a * std::exp(-p.b * r) * std::cos(p.a * std::numbers::pi * r);
}

std::array<double, 3> interaction_inputs(std::span<const double> x, const SynthConfig& config) {
  if (x.size() != kSynthInputs) {
    throw ShapeError("synthetic inputs have 10 columns, got " + std::to_string(x.size()));
  }
  std::array<double, 3> z{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (int j : config.active_index_sets[i]) z[i] += x[static_cast<std::size_t>(j - 1)];
    z[i] /= 10.0;
  }
  return z;
}

double f_sim(std::span<const double> x, const SynthConfig& config) {
  const auto z = interaction_inputs(x, config);
  return doppler(z[0], config.doppler) + damped_cosine(z[1], z[2], config.damcos);
}

SynthDataset gen_dataset(const SynthConfig& config) {
  if (!(config.sigma_eps >= 0.0) || !std::isfinite(config.sigma_eps)) {
    throw InvalidParameterError("sigma_eps must be finite and nonnegative");
  }
  for (const auto& set : config.active_index_sets) {
    if (set.empty()) throw InvalidParameterError("interaction index sets must be nonempty");
    for (int j : set) {
      if (j < 1 || j > static_cast<int>(kSynthInputs)) {
        throw InvalidParameterError("interaction index " + std::to_string(j) +
                                    " is outside 1..10");
      }
    }
  }

  SynthDataset ds;
  ds.predictors = Matrix(config.n, kSynthInputs);
  ds.responses.resize(config.n);
  ds.truth.resize(config.n);
  RandomStream inputs(config.seed, 0);
  RandomStream noise(config.seed, 1);
  for (std::size_t i = 0; i < config.n; ++i) {
    for (std::size_t j = 0; j < kSynthInputs; ++j) ds.predictors(i, j) = inputs.normal();
    ds.truth[i] = f_sim(ds.predictors.row(i), config);
    ds.responses[i] = ds.truth[i] + config.sigma_eps * noise.normal();
  }
  return ds;
}

InjectedOutliers inject_outliers(std::span<const double> responses, double mean, double sd,
                                 std::size_t n_out, Seed seed) {
  if (n_out > responses.size()) {
    throw InvalidInputError("cannot inject " + std::to_string(n_out) + " outliers into " +
                            std::to_string(responses.size()) + " points");
  }
  if (!(sd >= 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
    throw InvalidParameterError("outlier scale must be finite and nonnegative");
  }
  InjectedOutliers out;
  out.responses.assign(responses.begin(), responses.end());

  RandomStream stream(seed);
  std::vector<std::size_t> perm(responses.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_out; ++i) {
    const std::size_t j = i + stream.below(perm.size() - i);
    std::swap(perm[i], perm[j]);
  }
  out.indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_out));
  std::sort(out.indices.begin(), out.indices.end());
  for (std::size_t idx : out.indices) {
    const double k = 3.0 + 2.0 * stream.uniform();
    const double sign = stream.below(2) == 1 ? 1.0 : -1.0;
    out.responses[idx] = mean + sign * k * sd;
  }
  return out;
}

namespace {

BaselinePrediction predict_ols(const Matrix& train_x, std::span<const double> train_y,
                               const Matrix& test_x) {
  const auto n = static_cast<Eigen::Index>(train_x.rows);
  const auto p = static_cast<Eigen::Index>(train_x.cols + 1);
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) {
      design(i, j) = train_x(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1));
    }
    y(i) = train_y[static_cast<std::size_t>(i)];
  }

  BaselinePrediction out;
  Eigen::VectorXd beta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() == p) {
    beta = qr.solve(y);
  } else {
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += 1e-8;
    beta = gram.ldlt().solve(design.transpose() * y);
    out.ridge_fallback = true;
  }

  out.predictions.resize(test_x.rows);
  for (std::size_t i = 0; i < test_x.rows; ++i) {
    double v = beta(0);
    for (std::size_t j = 0; j < test_x.cols; ++j) v += beta(static_cast<Eigen::Index>(j + 1)) * test_x(i, j);
    out.predictions[i] = v;
  }
  return out;
}

BaselinePrediction predict_knn(std::size_t k, const Matrix& train_x, std::span<const double> train_y,
                               const Matrix& test_x) {
  if (k < 1) throw InvalidParameterError("k-NN needs k >= 1");
  if (k > train_x.rows) {
    throw InvalidParameterError("k = " + std::to_string(k) + " exceeds the " +
                                std::to_string(train_x.rows) + " training points");
  }
  BaselinePrediction out;
  out.predictions.resize(test_x.rows);
  detail::parallel_for(test_x.rows, [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> dist(train_x.rows);
    const auto q = test_x.row(i);
    for (std::size_t t = 0; t < train_x.rows; ++t) {
      const auto r = train_x.row(t);
      double d = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) d += (q[j] - r[j]) * (q[j] - r[j]);
      dist[t] = {d, t};
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    double sum = 0.0;
    for (std::size_t m = 0; m < k; ++m) sum += train_y[dist[m].second];
    out.predictions[i] = sum / static_cast<double>(k);
  });
  return out;
}

}  // namespace

BaselinePrediction baseline_predict(const Baseline& model, const Matrix& train_x,
                                    std::span<const double> train_y, const Matrix& test_x) {
  if (train_x.rows != train_y.size()) {
    throw ShapeError("training inputs have " + std::to_string(train_x.rows) + " rows but " +
                     std::to_string(train_y.size()) + " responses");
  }
  if (train_x.rows == 0) throw InsufficientDataError("baseline needs training data");
  if (test_x.cols != train_x.cols) {
    throw ShapeError("test inputs have " + std::to_string(test_x.cols) + " columns, training has " +
                     std::to_string(train_x.cols));
  }
  switch (model.kind) {
    case BaselineKind::Mean: {
      const double m = std::accumulate(train_y.begin(), train_y.end(), 0.0) /
                       static_cast<double>(train_y.size());
      return {std::vector<double>(test_x.rows, m), false};
    }
    case BaselineKind::LinearOls:
      return predict_ols(train_x, train_y, test_x);
    case BaselineKind::Knn:
      return predict_knn(model.k, train_x, train_y, test_x);
  }
  throw InvalidParameterError("unknown baseline kind");
}

SplitIndices split_indices(std::size_t n, Seed seed, double train_fraction,
                           double calibration_fraction) {
  if (!(train_fraction >= 0.0) || !(calibration_fraction >= 0.0) ||
      train_fraction + calibration_fraction > 1.0) {
    throw InvalidParameterError("split fractions must be nonnegative and sum to at most 1");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  RandomStream stream(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[stream.below(i)]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  const auto n_calib = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(calibration_fraction * static_cast<double>(n))));
  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.calibration.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                       perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_calib));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_calib), perm.end());
  return s;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m.rows) throw ShapeError("row index out of range");
    std::copy_n(m.data.begin() + static_cast<std::ptrdiff_t>(rows[i] * m.cols), m.cols,
                out.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
  }
  return out;
}

std::vector<double> select(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= v.size()) throw ShapeError("index out of range");
    out[i] = v[idx[i]];
  }
  return out;
}

}  // namespace liftcal
