#include "sargd/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace sargd {

namespace {

std::uint8_t to_byte(double v) {
  const double r = std::round(255.0 * v);
  return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

void write_raw(const std::string& path, std::uint32_t w, std::uint32_t h, std::uint32_t format,
               const std::vector<std::uint8_t>& buffer) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = w;
  img.height = h;
  img.format = format;
  if (!png_image_write_to_file(&img, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw std::runtime_error("write_png " + path + ": " + msg);
  }
}

}  // namespace

ImageRGB read_png(const std::string& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw std::runtime_error("read_png " + path + ": " + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw std::runtime_error("read_png " + path + ": " + msg);
  }
  if (img.width == 0 || img.height == 0) throw std::runtime_error("read_png " + path + ": empty image");
  std::vector<double> rgb(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) rgb[i] = buffer[i] / 255.0;
  return ImageRGB(img.height, img.width, std::move(rgb));
}

void write_png(const std::string& path, const ImageRGB& image) {
  if (image.empty()) throw std::invalid_argument("write_png: empty image");
  std::vector<std::uint8_t> buffer(image.pixels().size());
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = to_byte(image.pixels()[i]);
  write_raw(path, static_cast<std::uint32_t>(image.width()), static_cast<std::uint32_t>(image.height()),
            PNG_FORMAT_RGB, buffer);
}

void write_mask_png(const std::string& path, const BinaryMask& mask) {
  if (mask.size() == 0) throw std::invalid_argument("write_mask_png: empty mask");
  std::vector<std::uint8_t> buffer(mask.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = mask.bits()[i] ? 255 : 0;
  write_raw(path, static_cast<std::uint32_t>(mask.width()), static_cast<std::uint32_t>(mask.height()),
            PNG_FORMAT_GRAY, buffer);
}

}  // namespace sargd
