#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "liftcal/distributions.hpp"
#include "liftcal/error.hpp"
#include "liftcal/random.hpp"
#include "oracles/oracles.hpp"

using namespace liftcal;
using Catch::Approx;

TEST_CASE("philox known answer") {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("random streams are deterministic and separable") {
  RandomStream a(Seed{42}), b(Seed{42}), c(Seed{43});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    differs = differs || (va != c.next_u64());
  }
  CHECK(differs);

  RandomStream root(Seed{7});
  auto s1 = root.substream(0), s2 = root.substream(1);
  CHECK(s1.next_u64() != s2.next_u64());
  CHECK(root.substream(3).next_u64() == RandomStream(Seed{7}).substream(3).next_u64());

  RandomStream u(Seed{1});
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
    REQUIRE(u.below(7) < 7u);
  }
}

TEST_CASE("t_cdf examples and accuracy") {
  CHECK(t_cdf(0.0, 5) == 0.5);
  CHECK(t_cdf(std::numeric_limits<double>::infinity(), 3) == 1.0);
  CHECK(t_cdf(-std::numeric_limits<double>::infinity(), 3) == 0.0);
  CHECK(t_cdf(2.0, 1) == Approx(0.5 + std::atan(2.0) / std::numbers::pi).margin(1e-12));
  CHECK(t_cdf(2.0, 1) == Approx(0.85242).margin(5e-6));
  CHECK_THROWS_AS(t_cdf(1.0, 0), InvalidParameterError);

  for (double df : {1.0, 2.0, 3.0, 7.0, 30.0, 200.0}) {
    for (double x : {-6.0, -2.5, -0.3, 0.1, 1.0, 2.2, 4.0, 9.0}) {
      INFO("df=" << df << " x=" << x);
      CHECK(t_cdf(x, static_cast<DegreesOfFreedom>(df)) ==
            Approx(oracle::t_cdf(x, df)).margin(1e-10));
    }
  }
}

TEST_CASE("t_cdf is monotone") {
  for (DegreesOfFreedom df : {1, 4, 50}) {
    double prev = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.05) {
      const double v = t_cdf(x, df);
      REQUIRE(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("t_quantile examples") {
  CHECK(t_quantile(0.5, 7) == 0.0);
  CHECK(t_quantile(0.975, 1) == Approx(12.70620).margin(5e-6));
  CHECK(t_quantile(0.975, 1) == Approx(std::tan(std::numbers::pi * 0.475)).epsilon(1e-13));
  CHECK(t_quantile(0.975, 10) == Approx(oracle::t_quantile(0.975, 10)).margin(1e-9));
  CHECK(t_quantile(0.975, 10) == Approx(2.228139).margin(5e-7));
  CHECK_THROWS_AS(t_quantile(0.0, 3), InvalidParameterError);
  CHECK_THROWS_AS(t_quantile(1.0, 3), InvalidParameterError);
  CHECK_THROWS_AS(t_quantile(0.5, 0), InvalidParameterError);
}

TEST_CASE("t_quantile inverts t_cdf on the full grid") {
  for (DegreesOfFreedom df = 1; df <= 200; ++df) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 99; ++k) {
      const double p = k / 100.0;
      const double q = t_quantile(p, df);
      INFO("df=" << df << " p=" << p);
      REQUIRE(std::fabs(t_cdf(q, df) - p) <= 1e-9);
      REQUIRE(q > prev);
      REQUIRE(std::fabs(t_quantile(1.0 - p, df) + q) <= 1e-12);
      prev = q;
    }
  }
}

TEST_CASE("t_quantile approaches the normal quantile") {
  for (double p : {0.01, 0.1, 0.3, 0.7, 0.95, 0.99}) {
    CHECK(std::fabs(t_quantile(p, 10000) - normal_quantile(p)) <= 1e-3);
  }
}

TEST_CASE("normal_quantile") {
  CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-15));
  CHECK(normal_quantile(0.975) == Approx(oracle::normal_quantile(0.975)).margin(1e-9));
  CHECK(normal_quantile(0.975) == Approx(1.959964).margin(5e-7));
  CHECK(normal_quantile(oracle::normal_cdf_series(1.0)) == Approx(1.0).margin(1e-9));
  CHECK(normal_quantile(0.841345) == Approx(1.0).margin(1e-5));
  for (double p : {1e-10, 1e-6, 0.001, 0.02, 0.024, 0.3, 0.6, 0.9, 0.98, 0.999, 1 - 1e-9}) {
    INFO("p=" << p);
    CHECK(normal_quantile(p) == Approx(oracle::normal_quantile(p)).margin(1e-9));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), InvalidParameterError);
  CHECK_THROWS_AS(normal_quantile(1.5), InvalidParameterError);
}

TEST_CASE("bivariate t l-infinity quantile") {
  SECTION("Gaussian limit") {
    const double expected = oracle::gaussian_linf_quantile(0.05);
    CHECK(expected == Approx(2.2365).margin(1e-4));
    const auto q = bivariate_t_linf_quantile(0.05, 1'000'000, Seed{3});
    CHECK(std::fabs(q.value - expected) <= 3.0 * q.standard_error);
  }
  SECTION("df = 20 against the quadrature oracle") {
    const auto q = bivariate_t_linf_quantile(0.05, 20, Seed{1});
    const double expected = oracle::bivariate_t_linf_quantile(0.05, 20.0);
    CHECK(q.standard_error > 0.0);
    CHECK(std::fabs(q.value - expected) <= 3.0 * q.standard_error);
    CHECK(q.draws == kDefaultLinfDraws);
  }
  SECTION("deterministic given the seed") {
    const auto a = bivariate_t_linf_quantile(0.1, 5, Seed{9}, 10000);
    const auto b = bivariate_t_linf_quantile(0.1, 5, Seed{9}, 10000);
    CHECK(a.value == b.value);
  }
  SECTION("zero-coverage boundary") {
    const auto q = bivariate_t_linf_quantile(0.999, 10, Seed{2}, 100000);
    CHECK(q.value < 0.05);
  }
  CHECK_THROWS_AS(bivariate_t_linf_quantile(0.0, 5, Seed{1}), InvalidParameterError);
  CHECK_THROWS_AS(bivariate_t_linf_quantile(0.05, 0, Seed{1}), InvalidParameterError);
}

TEST_CASE("noise log densities") {
  CHECK(noise_logpdf(0.0, {NoiseKind::Gaussian, 0.0, 1.0}) ==
        Approx(-0.5 * std::log(2 * std::numbers::pi)).margin(1e-15));
  CHECK(noise_logpdf(0.0, {NoiseKind::Gumbel, 0.0, 1.0}) == Approx(-1.0).margin(1e-15));
  CHECK(noise_logpdf(0.0, {NoiseKind::Gumbel, 0.0, 2.0}) ==
        Approx(-1.0 - std::log(2.0)).margin(1e-15));
  CHECK_THROWS_AS(noise_logpdf(0.0, {NoiseKind::Gaussian, 0.0, 0.0}), InvalidParameterError);
  CHECK_THROWS_AS(noise_logpdf(0.0, {NoiseKind::Gumbel, 0.0, -1.0}), InvalidParameterError);

  // Densities integrate to one.
  for (auto kind : {NoiseKind::Gaussian, NoiseKind::Gumbel}) {
    const NoiseFamily fam{kind, 0.3, 1.7};
    const double mass =
        oracle::integrate([&](double u) { return std::exp(noise_logpdf(u, fam)); }, -40.0, 60.0, 1e-12);
    CHECK(mass == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("noise samples") {
  CHECK(noise_sample({}, 0, Seed{1}).empty());
  CHECK_THROWS_AS(noise_sample({NoiseKind::Gaussian, 0.0, -2.0}, 3, Seed{1}), InvalidParameterError);

  const auto g = noise_sample({NoiseKind::Gaussian, 0.0, 1.0}, 1'000'000, Seed{11});
  CHECK(std::fabs(oracle::mean(g)) <= 0.005);
  CHECK(oracle::variance(g) == Approx(1.0).margin(0.01));

  const NoiseFamily gum{NoiseKind::Gumbel, 0.0, 1.0};
  const auto s = noise_sample(gum, 1'000'000, Seed{12});
  const double gumbel_mean = oracle::integrate(
      [&](double u) { return u * std::exp(noise_logpdf(u, gum)); }, -20.0, 60.0, 1e-12);
  CHECK(gumbel_mean == Approx(std::numbers::egamma).margin(1e-8));
  CHECK(std::fabs(oracle::mean(s) - gumbel_mean) <= 0.01);
  CHECK(noise_mean(gum) == Approx(std::numbers::egamma).margin(1e-15));

  const auto again = noise_sample(gum, 1000, Seed{12});
  CHECK(std::equal(again.begin(), again.end(), s.begin()));

  for (auto kind : {NoiseKind::Gaussian, NoiseKind::Gumbel}) {
    const NoiseFamily fam{kind, 1.0, 2.0};
    const auto a = noise_sample(fam, 100000, Seed{21});
    const auto b = noise_sample(fam, 100000, Seed{22});
    auto cdf = [&](double u) { return noise_cdf(u, fam); };
    CHECK(oracle::ks_distance(a, cdf) <= 0.01);
    CHECK(oracle::ks_distance(b, cdf) <= 0.01);
    CHECK(a != b);
  }
}

TEST_CASE("gamma and chi-square draws have the right moments") {
  RandomStream s(Seed{5});
  for (double shape : {0.5, 1.0, 3.5, 10.0}) {
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double g = s.gamma(shape);
      sum += g;
      sq += g * g;
    }
    const double m = sum / n;
    CHECK(m == Approx(shape).epsilon(0.02));
    CHECK(sq / n - m * m == Approx(shape).epsilon(0.05));
  }
}

TEST_CASE("incomplete beta and log beta") {
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0, 1.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0, 0.0) == 1.0);
  // I_x(1, b) = 1 - (1 - x)^b
  CHECK(regularized_incomplete_beta(1.0, 4.0, 0.3, 0.7) ==
        Approx(1.0 - std::pow(0.7, 4)).margin(1e-14));
  for (double a : {0.5, 3.0, 12.5, 400.0}) {
    for (double b : {0.5, 2.0, 30.0}) {
      CHECK(log_beta(a, b) ==
            Approx(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)).margin(1e-9));
    }
  }
}
