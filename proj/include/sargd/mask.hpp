#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sargd {

/// H x W map of {0, 1}. Holds the artifact mask and its complement, the
/// reality mask. Latent-scale masks broadcast across channels at use sites.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t height, std::size_t width, bool fill = false);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return bits_.size(); }

  bool at(std::size_t y, std::size_t x) const { return bits_[y * width_ + x] != 0; }
  void set(std::size_t y, std::size_t x, bool v) { bits_[y * width_ + x] = v ? 1 : 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count_ones() const;
  double fraction_ones() const;
  BinaryMask inverted() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace sargd
