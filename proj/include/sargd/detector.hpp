#pragma once

#include <cstddef>
#include <variant>

#include "sargd/denoiser.hpp"
#include "sargd/image.hpp"
#include "sargd/mask.hpp"

namespace sargd {

struct NoDetector {};

/// Reports the injected ground truth, scaled from latent to image pixels.
struct OracleDetector {
  ArtifactSpec truth;
  std::size_t latent_height = 0;
  std::size_t latent_width = 0;
};

/// Flags pixels whose local luma statistics diverge from the reference:
/// |mean_img - mean_ref| + |std_img - std_ref| > threshold over a patch x patch window.
struct StatDivergenceDetector {
  std::size_t patch = 5;
  double threshold = 0.1;
};

using DetectorSpec = std::variant<NoDetector, OracleDetector, StatDivergenceDetector>;

enum class DetectorKind { none, oracle, stat_divergence };

DetectorKind detector_kind(const DetectorSpec& det);
void validate_detector(const DetectorSpec& det);

BinaryMask detect_artifacts(const DetectorSpec& det, const ImageRGB& image, const ImageRGB& reference);
BinaryMask reality_mask(const DetectorSpec& det, const ImageRGB& image, const ImageRGB& reference);

// Max-pool: a latent cell is 1 iff any pixel in its block is 1.
BinaryMask resize_mask_to_latent(const BinaryMask& mask, std::size_t latent_height,
                                 std::size_t latent_width);

// Nearest-neighbour integer upscale.
BinaryMask upscale_mask(const BinaryMask& mask, std::size_t height, std::size_t width);

/// Fraction of cells marked realistic, in [0, 1].
struct RealityScore {
  double value = 0.0;

  auto operator<=>(const RealityScore&) const = default;
};

RealityScore reality_score(const BinaryMask& mask);

}  // namespace sargd
