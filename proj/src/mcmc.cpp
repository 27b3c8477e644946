#include "liftcal/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "liftcal/error.hpp"
#include "parallel.hpp"

namespace liftcal {

namespace {

constexpr std::size_t kAdaptWindow = 50;

struct ChainResult {
  std::vector<PosteriorSample> samples;
  std::size_t accepted = 0;
  std::size_t proposed = 0;
};

// Works on (c, beta1, log_scale) with c = beta0 + beta1 * mean(f), which
// removes most of the intercept/slope correlation.
ChainResult run_chain(const CalibrationSet& data, NoiseKind family, const McmcConfig& config,
                      std::size_t keep, RandomStream stream, const LiftedFit& ols) {
  const double fbar = ols.mu_hat;
  const double n = static_cast<double>(data.size());
  const double sigma0 = std::max(ols.sigma_u_hat, 1e-12 * (ols.s_y + std::fabs(ols.mean_y) + 1.0));

  std::array<double, 3> theta = {ols.beta0_hat + ols.beta1_hat * fbar, ols.beta1_hat,
                                 std::log(sigma0)};
  std::array<double, 3> step = {2.4 * sigma0 / std::sqrt(n), 2.4 * sigma0 / std::sqrt(ols.ss_fhat),
                                2.4 / std::sqrt(2.0 * n)};

  auto logp = [&](const std::array<double, 3>& t) {
    return log_posterior({t[0] - t[1] * fbar, t[1], t[2]}, data, family);
  };
  double current = logp(theta);

  ChainResult out;
  out.samples.reserve(keep);
  std::array<std::size_t, 3> window_accepts{};
  const std::size_t total = config.burn_in + keep;
  for (std::size_t it = 0; it < total; ++it) {
    const bool burning = it < config.burn_in;
    for (std::size_t j = 0; j < 3; ++j) {
      auto proposal = theta;
      proposal[j] += step[j] * stream.normal();
      const double candidate = logp(proposal);
      const bool accept = std::isfinite(candidate) && std::log(stream.uniform()) < candidate - current;
      if (accept) {
        theta = proposal;
        current = candidate;
      }
      if (burning) {
        window_accepts[j] += accept ? 1 : 0;
      } else {
        ++out.proposed;
        out.accepted += accept ? 1 : 0;
      }
    }
    if (burning && (it + 1) % kAdaptWindow == 0) {
      const double k = static_cast<double>((it + 1) / kAdaptWindow);
      const double gain = std::min(1.0, 5.0 / std::sqrt(k));
      for (std::size_t j = 0; j < 3; ++j) {
        const double rate = static_cast<double>(window_accepts[j]) / kAdaptWindow;
        step[j] *= std::exp(gain * (rate - config.target_acceptance));
        window_accepts[j] = 0;
      }
    }
    if (!burning) out.samples.push_back({theta[0] - theta[1] * fbar, theta[1], theta[2]});
  }
  return out;
}

double sample_median(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

double log_posterior(const PosteriorSample& params, const CalibrationSet& data, NoiseKind family) {
  const auto& y = data.responses();
  const auto& f = data.predictions();
  const double scale = std::exp(params.log_scale);
  if (!(scale > 0.0) || !std::isfinite(scale)) return -std::numeric_limits<double>::infinity();
  const double log_scale = params.log_scale;
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = (y[i] - params.beta0 - params.beta1 * f[i]) / scale;
    if (family == NoiseKind::Gaussian) {
      sum += -0.5 * z * z;
    } else {
      sum += -z - std::exp(-z);
    }
  }
  const double n = static_cast<double>(y.size());
  const double norm = family == NoiseKind::Gaussian ? -0.5 * std::log(2.0 * std::numbers::pi) : 0.0;
  return sum + n * (norm - log_scale) + log_scale;
}

PosteriorChain sample_posterior(const CalibrationSet& data, NoiseKind family,
                                const McmcConfig& config) {
  if (data.size() < 4) throw InsufficientDataError("posterior sampling needs at least 4 points");
  if (config.m_samples < 100) throw InvalidParameterError("m_samples must be at least 100");
  if (config.n_chains < 1) throw InvalidParameterError("need at least one chain");
  if (config.n_chains > config.m_samples) {
    throw InvalidParameterError("more chains than requested samples");
  }
  if (!(config.target_acceptance > 0.0 && config.target_acceptance < 1.0)) {
    throw InvalidParameterError("target acceptance must lie in (0, 1)");
  }
  const LiftedFit ols = fit_lifted_linear(data);

  const RandomStream root(config.seed);
  std::vector<ChainResult> results(config.n_chains);
  detail::parallel_for(config.n_chains, [&](std::size_t c) {
    const std::size_t keep =
        config.m_samples / config.n_chains + (c < config.m_samples % config.n_chains ? 1 : 0);
    results[c] = run_chain(data, family, config, keep, root.substream(c), ols);
  });

  PosteriorChain chain;
  chain.burn_in = config.burn_in;
  chain.family = family;
  chain.seed = config.seed;
  chain.samples.reserve(config.m_samples);
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  for (auto& r : results) {
    chain.chain_lengths.push_back(r.samples.size());
    chain.samples.insert(chain.samples.end(), r.samples.begin(), r.samples.end());
    accepted += r.accepted;
    proposed += r.proposed;
  }
  chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  if (chain.acceptance_rate < 0.01) {
    throw TuningFailureError("Metropolis acceptance rate " + std::to_string(chain.acceptance_rate) +
                             " is below 0.01 after adaptation");
  }
  return chain;
}

Interval predictive_interval_mcmc(const PosteriorChain& chain, double f0, double alpha,
                                  Seed seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameterError("alpha must lie in (0, 1)");
  if (!std::isfinite(f0)) throw InvalidInputError("prediction f0 must be finite");
  const std::size_t m = chain.samples.size();
  if (m == 0) throw InsufficientSamplesError("the chain is empty");
  const auto lo_rank = static_cast<std::size_t>(std::floor(0.5 * alpha * static_cast<double>(m)));
  const auto hi_rank =
      static_cast<std::size_t>(std::floor((1.0 - 0.5 * alpha) * static_cast<double>(m)));
  if (lo_rank < 1) {
    throw InsufficientSamplesError("M * alpha / 2 < 1: " + std::to_string(m) +
                                   " samples cannot resolve alpha = " + std::to_string(alpha));
  }

  RandomStream stream(seed);
  std::vector<double> values(m);
  for (std::size_t l = 0; l < m; ++l) {
    const auto& s = chain.samples[l];
    const NoiseFamily noise{chain.family, 0.0, std::exp(s.log_scale)};
    values[l] = s.beta0 + s.beta1 * f0 + noise_draw(noise, stream);
  }
  Interval iv;
  iv.method = IntervalMethod::Mcmc;
  iv.level = 1.0 - alpha;
  iv.center = sample_median(values);
  std::sort(values.begin(), values.end());
  iv.lower = values[lo_rank - 1];
  iv.upper = values[std::max(hi_rank, lo_rank) - 1];
  return iv;
}

double effective_sample_size(std::span<const double> series) {
  const std::size_t m = series.size();
  if (m < 10) throw InsufficientSamplesError("ESS needs at least 10 draws");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(m);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < m; ++i) s += (series[i] - mean) * (series[i + lag] - mean);
    return s / static_cast<double>(m);
  };
  const double c0 = autocov(0);
  const double md = static_cast<double>(m);
  if (!(c0 > 0.0)) return 1.0;

  // tau = -1 + 2 * sum of positive pair sums Gamma_k = rho_2k + rho_2k+1.
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < m; ++k) {
    const double gamma = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (!(gamma > 0.0)) break;
    tau += 2.0 * gamma;
  }
  return std::clamp(md / tau, 1.0, md);
}

ChainDiagnostics chain_diagnostics(const PosteriorChain& chain) {
  const std::size_t m = chain.samples.size();
  if (m < 10) throw InsufficientSamplesError("diagnostics need at least 10 draws");
  ChainDiagnostics diag;
  diag.acceptance_rate = chain.acceptance_rate;

  std::vector<std::size_t> lengths = chain.chain_lengths;
  if (lengths.empty()) lengths.push_back(m);
  std::size_t offset = 0;
  std::vector<double> buf;
  for (std::size_t len : lengths) {
    for (std::size_t j = 0; j < 3; ++j) {
      buf.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        const auto& s = chain.samples[offset + i];
        buf[i] = j == 0 ? s.beta0 : (j == 1 ? s.beta1 : s.log_scale);
      }
      diag.ess[j] += len >= 10 ? effective_sample_size(buf) : static_cast<double>(len);
    }
    offset += len;
  }
  for (auto& e : diag.ess) e = std::clamp(e, 1.0, static_cast<double>(m));
  return diag;
}

}  // namespace liftcal
