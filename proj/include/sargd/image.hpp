#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace sargd {

/// Interleaved RGB image with channel values in [0, 1].
class ImageRGB {
 public:
  ImageRGB() = default;
  ImageRGB(std::size_t height, std::size_t width, double fill = 0.0);
  ImageRGB(std::size_t height, std::size_t width, std::vector<double> rgb);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  bool empty() const { return pixels_.empty(); }

  double& at(std::size_t y, std::size_t x, std::size_t c) { return pixels_[(y * width_ + x) * 3 + c]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels_[(y * width_ + x) * 3 + c];
  }

  void set(std::size_t y, std::size_t x, std::array<double, 3> rgb) {
    for (std::size_t c = 0; c < 3; ++c) at(y, x, c) = rgb[c];
  }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool same_dims(const ImageRGB& o) const { return height_ == o.height_ && width_ == o.width_; }
  bool operator==(const ImageRGB&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
};

/// Single-channel plane, used for luma and intermediate filtering.
struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), values(h * w, fill) {}

  double& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
  double at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

ImageRGB center_crop(const ImageRGB& image, std::size_t height, std::size_t width);

}  // namespace sargd
