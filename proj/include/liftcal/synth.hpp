#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "liftcal/random.hpp"

namespace liftcal {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data).subspan(i * cols, cols);
  }
};

struct DopplerParams {
  double a = 1.0;
  double b = 2.1;
  double c = 0.05;
};

struct DampedCosineParams {
  double a = 1.0;
  double b = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// a sqrt(|z| (1 - |z|)) sin(b pi / (z + c)); (1 - |z|) is floored at 0.
double doppler(double z, const DopplerParams& p = {});

/// a exp(-b r) cos(a pi r), r = |(z1, z2) - (c1, c2)|.
double damped_cosine(double z1, double z2, const DampedCosineParams& p = {});

inline constexpr std::size_t kSynthInputs = 10;

struct SynthConfig {
  std::size_t n = 1000;
  double sigma_eps = 0.1;
  Seed seed{};
  DopplerParams doppler{};
  DampedCosineParams damcos{};
  /// 1-based input indices feeding z1, z2, z3.
  std::array<std::vector<int>, 3> active_index_sets = {
      std::vector<int>{1, 2, 3, 4}, std::vector<int>{4, 5, 6, 7}, std::vector<int>{7, 8, 9, 10}};
};

struct SynthDataset {
  Matrix predictors;  // n x 10
  std::vector<double> responses;
  std::vector<double> truth;
};

/// z_i = sum_{j in I_i} x_j / 10.
std::array<double, 3> interaction_inputs(std::span<const double> x, const SynthConfig& config);

/// f_sim(x) = doppler(z1) + damped_cosine(z2, z3).
double f_sim(std::span<const double> x, const SynthConfig& config);

/// x_j iid N(0, 1); y = f_sim(x) + N(0, sigma_eps^2).
SynthDataset gen_dataset(const SynthConfig& config);

struct InjectedOutliers {
  std::vector<double> responses;
  std::vector<std::size_t> indices;  // ascending
};

/// Replaces n_out distinct entries by mean + (2b - 1) k sd, k ~ U(3, 5),
/// b ~ Bernoulli(1/2).
InjectedOutliers inject_outliers(std::span<const double> responses, double mean, double sd,
                                 std::size_t n_out, Seed seed);

enum class BaselineKind { Mean, LinearOls, Knn };

struct Baseline {
  BaselineKind kind = BaselineKind::Mean;
  std::size_t k = 5;  // Knn only
};

struct BaselinePrediction {
  std::vector<double> predictions;
  bool ridge_fallback = false;  // LinearOls hit a rank-deficient design
};

BaselinePrediction baseline_predict(const Baseline& model, const Matrix& train_x,
                                    std::span<const double> train_y, const Matrix& test_x);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> calibration;
  std::vector<std::size_t> test;
};

/// Random permutation cut 70 / 20 / 10 by default.
SplitIndices split_indices(std::size_t n, Seed seed, double train_fraction = 0.7,
                           double calibration_fraction = 0.2);

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);
std::vector<double> select(std::span<const double> v, std::span<const std::size_t> idx);

}  // namespace liftcal
