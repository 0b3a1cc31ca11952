#pragma once

#include <string>

#include "sargd/image.hpp"
#include "sargd/mask.hpp"

namespace sargd {

// 8-bit PNG I/O. Any PNG color type is read as RGB and mapped by v/255;
// writes use round(255 * v).
ImageRGB read_png(const std::string& path);
void write_png(const std::string& path, const ImageRGB& image);

// Grayscale mask: 0 -> 0, 1 -> 255.
void write_mask_png(const std::string& path, const BinaryMask& mask);

}  // namespace sargd
