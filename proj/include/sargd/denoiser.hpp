#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "sargd/diffusion.hpp"
#include "sargd/latent.hpp"
#include "sargd/mask.hpp"

namespace sargd {

/// Half-open rectangle in latent cell coordinates.
struct Rect {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t area() const { return height * width; }
  bool operator==(const Rect&) const = default;
};

enum class ArtifactMode { bias, noise };

/// Inclusive interval of reverse steps.
struct StepRange {
  std::size_t lo = 1;
  std::size_t hi = std::numeric_limits<std::size_t>::max();

  bool contains(std::size_t t) const { return t >= lo && t <= hi; }
};

/// Ground-truth artifact injected into a noise prediction.
struct ArtifactSpec {
  std::vector<Rect> region;
  ArtifactMode mode = ArtifactMode::bias;
  double magnitude = 5.0;
  // When set, the injected amount is magnitude * sqrt(1 - abar_t).
  bool noise_scaled = false;
  StepRange active;
  std::uint64_t noise_seed = 0;
};

/// Closed-form noise predictor for a per-element Gaussian prior
/// x0 ~ N(mean, var). Without an explicit mean the conditioning latent is
/// used as the prior mean.
struct AnalyticGaussian {
  double prior_var = 1.0;
  std::optional<LatentGrid> prior_mean;
};

/// Wraps an analytic denoiser and injects `artifact` inside its region
/// while the step is within the active range.
struct Corruptor {
  AnalyticGaussian inner;
  ArtifactSpec artifact;
};

using DenoiserSpec = std::variant<AnalyticGaussian, Corruptor>;

// E[x0 | x_t] under the Gaussian prior.
LatentGrid posterior_mean(const AnalyticGaussian& d, const LatentGrid& x_t, const LatentGrid& cond,
                          std::size_t t, const NoiseSchedule& schedule);

LatentGrid predict_noise(const DenoiserSpec& d, const LatentGrid& x_t, const LatentGrid& cond,
                         std::size_t t, const NoiseSchedule& schedule);

void validate_artifact(const ArtifactSpec& a, std::size_t latent_height, std::size_t latent_width);

BinaryMask oracle_artifact_mask(const ArtifactSpec& a, std::size_t latent_height,
                                std::size_t latent_width);

}  // namespace sargd
