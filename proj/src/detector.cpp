#include "sargd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sargd/codec.hpp"

namespace sargd {

BinaryMask::BinaryMask(std::size_t height, std::size_t width, bool fill)
    : height_(height), width_(width), bits_(height * width, fill ? 1 : 0) {}

std::size_t BinaryMask::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double BinaryMask::fraction_ones() const {
  if (bits_.empty()) return 0.0;
  return static_cast<double>(count_ones()) / static_cast<double>(bits_.size());
}

BinaryMask BinaryMask::inverted() const {
  BinaryMask out = *this;
  for (auto& b : out.bits_) b ^= 1;
  return out;
}

DetectorKind detector_kind(const DetectorSpec& det) {
  if (std::holds_alternative<OracleDetector>(det)) return DetectorKind::oracle;
  if (std::holds_alternative<StatDivergenceDetector>(det)) return DetectorKind::stat_divergence;
  return DetectorKind::none;
}

void validate_detector(const DetectorSpec& det) {
  if (const auto* s = std::get_if<StatDivergenceDetector>(&det)) {
    if (s->patch < 3 || s->patch % 2 == 0) {
      throw std::invalid_argument("stat_divergence: patch must be odd and >= 3");
    }
    if (!(s->threshold > 0.0)) throw std::invalid_argument("stat_divergence: threshold must be > 0");
  }
  if (const auto* o = std::get_if<OracleDetector>(&det)) {
    validate_artifact(o->truth, o->latent_height, o->latent_width);
  }
}

namespace {

// Summed-area table with one row/column of zero padding.
struct Integral {
  std::size_t h, w;
  std::vector<double> sum, sq;

  explicit Integral(const Plane& p) : h(p.height), w(p.width), sum((h + 1) * (w + 1), 0.0), sq(sum) {
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const double v = p.at(y, x);
        const std::size_t i = (y + 1) * (w + 1) + (x + 1);
        sum[i] = v + sum[i - 1] + sum[i - (w + 1)] - sum[i - (w + 1) - 1];
        sq[i] = v * v + sq[i - 1] + sq[i - (w + 1)] - sq[i - (w + 1) - 1];
      }
  }

  // Mean and standard deviation over rows [y0, y1) and cols [x0, x1).
  std::pair<double, double> stats(std::size_t y0, std::size_t y1, std::size_t x0, std::size_t x1) const {
    const auto box = [&](const std::vector<double>& t) {
      return t[y1 * (w + 1) + x1] - t[y0 * (w + 1) + x1] - t[y1 * (w + 1) + x0] + t[y0 * (w + 1) + x0];
    };
    const double n = static_cast<double>((y1 - y0) * (x1 - x0));
    const double mean = box(sum) / n;
    const double var = std::max(0.0, box(sq) / n - mean * mean);
    return {mean, std::sqrt(var)};
  }
};

BinaryMask stat_divergence(const StatDivergenceDetector& d, const ImageRGB& image,
                           const ImageRGB& reference) {
  const Integral a(rgb_to_y(image));
  const Integral b(rgb_to_y(reference));
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  const std::size_t r = d.patch / 2;
  BinaryMask mask(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t y0 = y >= r ? y - r : 0;
    const std::size_t y1 = std::min(h, y + r + 1);
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t x0 = x >= r ? x - r : 0;
      const std::size_t x1 = std::min(w, x + r + 1);
      const auto [ma, sa] = a.stats(y0, y1, x0, x1);
      const auto [mb, sb] = b.stats(y0, y1, x0, x1);
      mask.set(y, x, std::abs(ma - mb) + std::abs(sa - sb) > d.threshold);
    }
  }
  return mask;
}

}  // namespace

BinaryMask upscale_mask(const BinaryMask& mask, std::size_t height, std::size_t width) {
  if (mask.height() == 0 || height % mask.height() != 0 || width % mask.width() != 0) {
    throw std::invalid_argument("upscale_mask: target dims must be integer multiples of the mask");
  }
  const std::size_t fy = height / mask.height();
  const std::size_t fx = width / mask.width();
  BinaryMask out(height, width);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) out.set(y, x, mask.at(y / fy, x / fx));
  return out;
}

BinaryMask detect_artifacts(const DetectorSpec& det, const ImageRGB& image, const ImageRGB& reference) {
  if (!image.same_dims(reference)) throw std::invalid_argument("detect_artifacts: dims mismatch");
  if (image.empty()) throw std::invalid_argument("detect_artifacts: empty image");
  validate_detector(det);
  if (const auto* o = std::get_if<OracleDetector>(&det)) {
    return upscale_mask(oracle_artifact_mask(o->truth, o->latent_height, o->latent_width),
                        image.height(), image.width());
  }
  if (const auto* s = std::get_if<StatDivergenceDetector>(&det)) return stat_divergence(*s, image, reference);
  throw std::invalid_argument("detect_artifacts: detector kind 'none' has no mask");
}

BinaryMask reality_mask(const DetectorSpec& det, const ImageRGB& image, const ImageRGB& reference) {
  return detect_artifacts(det, image, reference).inverted();
}

BinaryMask resize_mask_to_latent(const BinaryMask& mask, std::size_t latent_height,
                                 std::size_t latent_width) {
  if (latent_height == 0 || latent_width == 0 || mask.height() % latent_height != 0 ||
      mask.width() % latent_width != 0) {
    throw std::invalid_argument("resize_mask_to_latent: " + std::to_string(mask.height()) + "x" +
                                std::to_string(mask.width()) + " is not an integer multiple of " +
                                std::to_string(latent_height) + "x" + std::to_string(latent_width));
  }
  const std::size_t fy = mask.height() / latent_height;
  const std::size_t fx = mask.width() / latent_width;
  if (fy == 1 && fx == 1) return mask;
  BinaryMask out(latent_height, latent_width);
  for (std::size_t y = 0; y < mask.height(); ++y)
    for (std::size_t x = 0; x < mask.width(); ++x)
      if (mask.at(y, x)) out.set(y / fy, x / fx, true);
  return out;
}

RealityScore reality_score(const BinaryMask& mask) {
  if (mask.size() == 0) throw std::invalid_argument("reality_score: empty mask");
  return {mask.fraction_ones()};
}

}  // namespace sargd
