#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sargd/image.hpp"

namespace sargd {

enum class PatternKind { gradient, checkerboard, blobs };

// Deterministic synthetic test image; dims are multiples of 8 in [64, 128].
ImageRGB synthetic_image(std::size_t index, std::uint64_t seed);
PatternKind synthetic_kind(std::size_t index);

// Writes img_000.png, img_001.png, ... and returns the file paths.
std::vector<std::string> generate_corpus(const std::string& out_dir, std::size_t count,
                                         std::uint64_t seed);

}  // namespace sargd
