#pragma once

#include <cstddef>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

namespace sargd {

struct GridShape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t count() const { return channels * height * width; }
  bool operator==(const GridShape&) const = default;
};

std::string to_string(const GridShape& shape);

/// Channel-planar C x H x W tensor of doubles. Holds noisy latents, noise
/// draws, noise predictions and guidance latents alike.
class LatentGrid {
 public:
  LatentGrid() = default;
  explicit LatentGrid(GridShape shape, double fill = 0.0);
  LatentGrid(GridShape shape, std::vector<double> values);

  const GridShape& shape() const { return shape_; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return values_[(c * shape_.height + y) * shape_.width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return values_[(c * shape_.height + y) * shape_.width + x];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;
  bool all_zero() const;

  bool operator==(const LatentGrid&) const = default;

 private:
  GridShape shape_;
  std::vector<double> values_;
};

/// Throws std::invalid_argument naming `what` when the shapes differ.
void require_same_shape(const LatentGrid& a, const LatentGrid& b, const char* what);

// Debug dump: three little-endian uint32 dims (C, H, W) followed by C*H*W
// little-endian float32 values in channel-planar order.
void write_latent_raw(const std::string& path, const LatentGrid& grid);
LatentGrid read_latent_raw(const std::string& path);

}  // namespace sargd
