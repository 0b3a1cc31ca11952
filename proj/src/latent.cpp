#include "sargd/latent.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sargd {

std::string to_string(const GridShape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

LatentGrid::LatentGrid(GridShape shape, double fill) : shape_(shape), values_(shape.count(), fill) {}

LatentGrid::LatentGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.count()) {
    throw std::invalid_argument("LatentGrid: " + std::to_string(values_.size()) +
                                " values for shape " + to_string(shape_));
  }
}

bool LatentGrid::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool LatentGrid::all_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

void require_same_shape(const LatentGrid& a, const LatentGrid& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + to_string(a.shape()) +
                                " vs " + to_string(b.shape()));
  }
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b{static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                 static_cast<unsigned char>(v >> 16),
                                 static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw std::runtime_error("read_latent_raw: truncated file");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

}  // namespace

void write_latent_raw(const std::string& path, const LatentGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_latent_raw: cannot open " + path);
  put_u32(out, static_cast<std::uint32_t>(grid.channels()));
  put_u32(out, static_cast<std::uint32_t>(grid.height()));
  put_u32(out, static_cast<std::uint32_t>(grid.width()));
  for (double v : grid.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

LatentGrid read_latent_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_latent_raw: cannot open " + path);
  GridShape shape;
  shape.channels = get_u32(in);
  shape.height = get_u32(in);
  shape.width = get_u32(in);
  std::vector<double> values(shape.count());
  for (auto& v : values) v = std::bit_cast<float>(get_u32(in));
  return LatentGrid(shape, std::move(values));
}

}  // namespace sargd
