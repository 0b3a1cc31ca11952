#include "sargd/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "sargd/diffusion.hpp"
#include "sargd/png_io.hpp"

namespace sargd {

namespace {

using Color = std::array<double, 3>;

Color random_color(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

ImageRGB gradient(std::mt19937_64& rng, std::size_t h, std::size_t w) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> freq(1.0, 4.0);
  const Color a = random_color(rng, 0.05, 0.95);
  const Color b = random_color(rng, 0.05, 0.95);
  const double theta = angle(rng);
  const double ripple_freq = freq(rng);
  const double dx = std::cos(theta);
  const double dy = std::sin(theta);
  ImageRGB img(h, w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double u = (static_cast<double>(x) / w - 0.5) * dx + (static_cast<double>(y) / h - 0.5) * dy + 0.5;
      const double ripple = 0.05 * std::sin(2.0 * std::numbers::pi * ripple_freq * u);
      for (std::size_t c = 0; c < 3; ++c) img.at(y, x, c) = a[c] + (b[c] - a[c]) * u + ripple;
    }
  return img;
}

ImageRGB checkerboard(std::mt19937_64& rng, std::size_t h, std::size_t w) {
  static constexpr std::array<std::size_t, 5> kCells{4, 6, 8, 12, 16};
  const std::size_t cell = kCells[rng() % kCells.size()];
  const Color a = random_color(rng, 0.1, 0.45);
  const Color b = random_color(rng, 0.55, 0.9);
  const std::size_t oy = rng() % cell;
  const std::size_t ox = rng() % cell;
  ImageRGB img(h, w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) img.set(y, x, (((y + oy) / cell + (x + ox) / cell) % 2) ? a : b);
  return img;
}

ImageRGB blobs(std::mt19937_64& rng, std::size_t h, std::size_t w) {
  std::uniform_int_distribution<int> count(8, 20);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_real_distribution<double> sigma(3.0, 15.0);
  std::uniform_real_distribution<double> amp(-0.35, 0.35);
  const Color bg = random_color(rng, 0.3, 0.7);
  ImageRGB img(h, w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) img.set(y, x, bg);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double cy = pos(rng) * h;
    const double cx = pos(rng) * w;
    const double s = sigma(rng);
    const Color k{amp(rng), amp(rng), amp(rng)};
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
        const double g = std::exp(-d2 / (2.0 * s * s));
        for (std::size_t c = 0; c < 3; ++c) img.at(y, x, c) += k[c] * g;
      }
  }
  return img;
}

}  // namespace

PatternKind synthetic_kind(std::size_t index) { return static_cast<PatternKind>(index % 3); }

ImageRGB synthetic_image(std::size_t index, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index)));
  const std::size_t h = 64 + 8 * (rng() % 9);
  const std::size_t w = 64 + 8 * (rng() % 9);
  ImageRGB img;
  switch (synthetic_kind(index)) {
    case PatternKind::gradient: img = gradient(rng, h, w); break;
    case PatternKind::checkerboard: img = checkerboard(rng, h, w); break;
    case PatternKind::blobs: img = blobs(rng, h, w); break;
  }
  // Match what a PNG round trip would give.
  for (double& v : img.pixels()) v = std::round(255.0 * std::clamp(v, 0.0, 1.0)) / 255.0;
  return img;
}

std::vector<std::string> generate_corpus(const std::string& out_dir, std::size_t count, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%03zu.png", i);
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    write_png(path, synthetic_image(i, seed));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace sargd
