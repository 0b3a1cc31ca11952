#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sargd/latent.hpp"

namespace sargd {

/// Per-step DDPM coefficients. Steps are 1-based: t runs from 1 to T, and the
/// reverse loop visits them from T down to 1.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> betas);

  std::size_t total_steps() const { return beta_.size(); }
  double beta(std::size_t t) const { return beta_[index(t)]; }
  double alpha(std::size_t t) const { return alpha_[index(t)]; }
  double alpha_bar(std::size_t t) const { return alpha_bar_[index(t)]; }

  const std::vector<double>& betas() const { return beta_; }
  const std::vector<double>& alphas() const { return alpha_; }
  const std::vector<double>& alpha_bars() const { return alpha_bar_; }

  void require_step(std::size_t t) const;

 private:
  std::size_t index(std::size_t t) const;

  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
};

NoiseSchedule build_linear_schedule(std::size_t steps, double beta_start, double beta_end);

// The DDPM-1000 linear schedule (1e-4 .. 0.02) rescaled by 1000/T, so that
// alpha_bar at the last step stays comparable when T changes.
NoiseSchedule build_default_schedule(std::size_t steps);

/// Identifies one deterministic Gaussian stream. Callers advance explicitly
/// by deriving new stream ids; the value itself carries no hidden state.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream with_stream(std::uint64_t id) const { return {seed, id}; }
  RngStream next() const { return {seed, stream_id + 1}; }
};

std::uint64_t splitmix64(std::uint64_t x);

LatentGrid sample_gaussian(const GridShape& shape, RngStream rng);

// x_t = sqrt(abar_t) * x0 + sqrt(1 - abar_t) * noise
LatentGrid forward_diffuse(const LatentGrid& x0, std::size_t t, const NoiseSchedule& schedule,
                           const LatentGrid& noise);

// One ancestral DDPM step with sigma_t = sqrt(1 - alpha_t). `noise` must be
// all zeros at t = 1.
LatentGrid reverse_step(const LatentGrid& x_t, const LatentGrid& eps_hat, std::size_t t,
                        const NoiseSchedule& schedule, const LatentGrid& noise);

}  // namespace sargd
