#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "sargd/denoiser.hpp"

using namespace sargd;

namespace {

LatentGrid scalar(double v) { return LatentGrid({1, 1, 1}, v); }

LatentGrid random_grid(GridShape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  LatentGrid g(shape);
  for (double& v : g.values()) v = u(rng);
  return g;
}

}  // namespace

TEST_CASE("analytic denoiser: flat-prior limit predicts no noise") {
  const auto s = build_default_schedule(50);
  const LatentGrid cond = random_grid({3, 4, 4}, 1);
  const LatentGrid xt = random_grid({3, 4, 4}, 2, -3.0, 3.0);
  for (std::size_t t : {1u, 10u, 25u, 50u}) {
    const LatentGrid eps = predict_noise(AnalyticGaussian{1e12, std::nullopt}, xt, cond, t, s);
    for (double v : eps.values()) CHECK(std::abs(v) < 1e-4);
  }
}

TEST_CASE("analytic denoiser: scalar closed form") {
  const auto s = build_linear_schedule(2, 0.1, 0.2);  // abar_2 = 0.72
  const AnalyticGaussian d{1.0, std::nullopt};
  const LatentGrid m = posterior_mean(d, scalar(1.0), scalar(0.0), 2, s);
  CHECK(std::abs(m.values()[0] - std::sqrt(0.72)) < 1e-9);
  const LatentGrid eps = predict_noise(d, scalar(1.0), scalar(0.0), 2, s);
  CHECK(std::abs(eps.values()[0] - 0.529150) < 1e-5);
}

TEST_CASE("analytic denoiser: explicit prior mean overrides the conditioning latent") {
  const auto s = build_default_schedule(10);
  const LatentGrid cond = random_grid({1, 2, 2}, 3);
  const LatentGrid mean = random_grid({1, 2, 2}, 4);
  const LatentGrid xt = random_grid({1, 2, 2}, 5);
  CHECK(predict_noise(AnalyticGaussian{0.5, mean}, xt, cond, 4, s) ==
        predict_noise(AnalyticGaussian{0.5, std::nullopt}, xt, mean, 4, s));
}

TEST_CASE("posterior mean lies between the prior mean and x_t / sqrt(abar)") {
  const auto s = build_default_schedule(100);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> logv(-6.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double v = std::pow(10.0, logv(rng));
    const std::size_t t = 1 + rng() % 100;
    const LatentGrid mu = random_grid({2, 3, 3}, 100 + trial);
    const LatentGrid xt = random_grid({2, 3, 3}, 200 + trial, -4.0, 4.0);
    const LatentGrid m = posterior_mean(AnalyticGaussian{v, std::nullopt}, xt, mu, t, s);
    const double root = std::sqrt(s.alpha_bar(t));
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double a = mu.values()[i];
      const double b = xt.values()[i] / root;
      CHECK(m.values()[i] >= std::min(a, b) - 1e-12);
      CHECK(m.values()[i] <= std::max(a, b) + 1e-12);
    }
  }
}

TEST_CASE("corruptor adds a bias inside its region") {
  const auto s = build_default_schedule(20);
  const LatentGrid cond = random_grid({3, 4, 4}, 7);
  const LatentGrid xt = random_grid({3, 4, 4}, 8);
  const AnalyticGaussian inner{0.3, std::nullopt};
  ArtifactSpec a;
  a.region = {{0, 0, 1, 1}};
  a.mode = ArtifactMode::bias;
  a.magnitude = 10.0;
  a.active = {5, 15};
  const Corruptor corrupt{inner, a};

  const LatentGrid clean = predict_noise(inner, xt, cond, 10, s);
  const LatentGrid dirty = predict_noise(corrupt, xt, cond, 10, s);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 4; ++y)
      for (std::size_t x = 0; x < 4; ++x) {
        const double diff = dirty.at(c, y, x) - clean.at(c, y, x);
        if (y == 0 && x == 0) CHECK(diff == doctest::Approx(10.0).epsilon(1e-12));
        else CHECK(diff == 0.0);
      }

  SUBCASE("outside the active range it is bit-identical") {
    for (std::size_t t : {1u, 4u, 16u, 20u}) CHECK(predict_noise(corrupt, xt, cond, t, s) == predict_noise(inner, xt, cond, t, s));
  }
  SUBCASE("noise-scaled magnitude") {
    ArtifactSpec scaled = a;
    scaled.noise_scaled = true;
    const LatentGrid out = predict_noise(Corruptor{inner, scaled}, xt, cond, 10, s);
    CHECK(out.at(0, 0, 0) - clean.at(0, 0, 0) == doctest::Approx(10.0 * std::sqrt(1.0 - s.alpha_bar(10))));
  }
  SUBCASE("noise mode is seeded and region-local") {
    ArtifactSpec noisy = a;
    noisy.mode = ArtifactMode::noise;
    noisy.noise_seed = 77;
    noisy.region = {{1, 1, 2, 2}};
    const LatentGrid n1 = predict_noise(Corruptor{inner, noisy}, xt, cond, 10, s);
    const LatentGrid n2 = predict_noise(Corruptor{inner, noisy}, xt, cond, 10, s);
    CHECK(n1 == n2);
    CHECK(n1.at(0, 0, 0) == clean.at(0, 0, 0));
    CHECK(n1.at(0, 1, 1) != clean.at(0, 1, 1));
  }
}

TEST_CASE("predict_noise errors") {
  const auto s = build_default_schedule(5);
  const LatentGrid a({1, 2, 2});
  CHECK_THROWS_AS(predict_noise(AnalyticGaussian{1.0, std::nullopt}, a, a, 6, s), std::out_of_range);
  CHECK_THROWS_AS(predict_noise(AnalyticGaussian{1.0, std::nullopt}, a, LatentGrid({1, 2, 3}), 2, s),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict_noise(AnalyticGaussian{0.0, std::nullopt}, a, a, 2, s), std::invalid_argument);
  ArtifactSpec bad;
  bad.region = {{1, 1, 2, 2}};
  CHECK_THROWS_AS(predict_noise(Corruptor{AnalyticGaussian{}, bad}, a, a, 2, s), std::out_of_range);
}

TEST_CASE("oracle artifact mask") {
  ArtifactSpec a;
  CHECK(oracle_artifact_mask(a, 4, 4).count_ones() == 0);
  a.region = {{0, 0, 4, 4}};
  CHECK(oracle_artifact_mask(a, 4, 4).count_ones() == 16);
  a.region = {{0, 0, 2, 2}};
  const BinaryMask m = oracle_artifact_mask(a, 4, 4);
  CHECK(m.count_ones() == 4);
  CHECK(m.at(1, 1));
  CHECK_FALSE(m.at(2, 2));
  a.region = {{0, 0, 2, 2}, {1, 1, 2, 2}};
  CHECK(oracle_artifact_mask(a, 4, 4).count_ones() == 7);
  a.region = {{3, 3, 2, 1}};
  CHECK_THROWS_AS(oracle_artifact_mask(a, 4, 4), std::out_of_range);
}

TEST_CASE("reverse chain with the analytic denoiser samples the prior") {
  const std::size_t T = 50;
  const std::size_t N = 500;
  const double v = 0.25;
  const auto s = build_default_schedule(T);
  const LatentGrid mu = random_grid({1, 2, 2}, 31);
  const AnalyticGaussian d{v, std::nullopt};
  std::vector<double> mean(mu.size(), 0.0);
  for (std::size_t run = 0; run < N; ++run) {
    LatentGrid x = sample_gaussian(mu.shape(), {run, 0});
    for (std::size_t t = T; t >= 1; --t) {
      const LatentGrid noise = t > 1 ? sample_gaussian(mu.shape(), {run, t}) : LatentGrid(mu.shape());
      x = reverse_step(x, predict_noise(d, x, mu, t, s), t, s, noise);
    }
    for (std::size_t i = 0; i < x.size(); ++i) mean[i] += x.values()[i] / static_cast<double>(N);
  }
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(std::abs(mean[i] - mu.values()[i]) < 4.0 * std::sqrt(v / N));
}
