#include "sargd/image.hpp"

#include <stdexcept>
#include <string>

namespace sargd {

ImageRGB::ImageRGB(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), pixels_(height * width * 3, fill) {}

ImageRGB::ImageRGB(std::size_t height, std::size_t width, std::vector<double> rgb)
    : height_(height), width_(width), pixels_(std::move(rgb)) {
  if (pixels_.size() != height_ * width_ * 3) {
    throw std::invalid_argument("ImageRGB: expected " + std::to_string(height_ * width_ * 3) +
                                " values, got " + std::to_string(pixels_.size()));
  }
}

ImageRGB center_crop(const ImageRGB& image, std::size_t height, std::size_t width) {
  if (height > image.height() || width > image.width() || height == 0 || width == 0) {
    throw std::invalid_argument("center_crop: target larger than image or empty");
  }
  const std::size_t top = (image.height() - height) / 2;
  const std::size_t left = (image.width() - width) / 2;
  ImageRGB out(height, width);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t c = 0; c < 3; ++c) out.at(y, x, c) = image.at(top + y, left + x, c);
  return out;
}

}  // namespace sargd
