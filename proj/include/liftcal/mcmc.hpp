#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "liftcal/distributions.hpp"
#include "liftcal/intervals.hpp"
#include "liftcal/lifted_fit.hpp"
#include "liftcal/random.hpp"

namespace liftcal {

struct McmcConfig {
  std::size_t m_samples = 20000;  // kept draws, summed over chains
  std::size_t burn_in = 5000;     // per chain
  double target_acceptance = 0.234;
  Seed seed{};
  std::size_t n_chains = 4;
};

struct PosteriorSample {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double log_scale = 0.0;
};

struct PosteriorChain {
  std::vector<PosteriorSample> samples;  // chains concatenated in order
  std::vector<std::size_t> chain_lengths;
  double acceptance_rate = 0.0;  // post burn-in, over all coordinate moves
  std::size_t burn_in = 0;
  NoiseKind family = NoiseKind::Gaussian;
  Seed seed{};
};

/// Log-likelihood of the residuals under the family at scale exp(log_scale),
/// plus log_scale (flat prior on the scale, sampled on the log axis).
double log_posterior(const PosteriorSample& params, const CalibrationSet& data, NoiseKind family);

/// Component-wise random-walk Metropolis; step sizes adapt during burn-in and
/// are frozen afterwards. Each chain runs on its own substream.
PosteriorChain sample_posterior(const CalibrationSet& data, NoiseKind family,
                                const McmcConfig& config);

/// Equal-tailed interval from the order statistics floor(alpha/2 M) and
/// floor((1 - alpha/2) M) (1-based) of beta0 + beta1 f0 + u, one fresh noise
/// draw per posterior sample; center is the median.
Interval predictive_interval_mcmc(const PosteriorChain& chain, double f0, double alpha,
                                  Seed seed);

/// Geyer initial positive sequence estimate, clamped to [1, size].
double effective_sample_size(std::span<const double> series);

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  std::array<double, 3> ess{};  // beta0, beta1, log_scale; summed over chains
};

ChainDiagnostics chain_diagnostics(const PosteriorChain& chain);

}  // namespace liftcal
