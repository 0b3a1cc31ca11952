#include "sargd/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sargd/codec.hpp"

namespace sargd {

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> g{};
  double total = 0.0;
  const double centre = (kWindow - 1) / 2.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double d = static_cast<double>(i) - centre;
    g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Separable 'valid' Gaussian filter.
Plane filter_valid(const Plane& p, const std::array<double, kWindow>& g) {
  const std::size_t oh = p.height - kWindow + 1;
  const std::size_t ow = p.width - kWindow + 1;
  Plane rows(p.height, ow);
  for (std::size_t y = 0; y < p.height; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) s += g[k] * p.at(y, x + k);
      rows.at(y, x) = s;
    }
  Plane out(oh, ow);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) s += g[k] * rows.at(y + k, x);
      out.at(y, x) = s;
    }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.height, a.width);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

void require_same(const Plane& a, const Plane& b) {
  if (a.height != b.height || a.width != b.width) throw std::invalid_argument("metrics: dims mismatch");
  if (a.values.empty()) throw std::invalid_argument("metrics: empty image");
}

}  // namespace

double mse(const Plane& a, const Plane& b) {
  require_same(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    s += d * d;
  }
  return s / static_cast<double>(a.values.size());
}

double psnr_y(const ImageRGB& a, const ImageRGB& b) {
  if (!a.same_dims(b)) throw std::invalid_argument("psnr_y: dims mismatch");
  const double m = mse(rgb_to_y(a), rgb_to_y(b));
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

double ssim(const Plane& a, const Plane& b) {
  require_same(a, b);
  if (a.height < kWindow || a.width < kWindow) {
    throw std::invalid_argument("ssim: both dims must be >= 11");
  }
  const auto g = gaussian_taps();
  const Plane mu_a = filter_valid(a, g);
  const Plane mu_b = filter_valid(b, g);
  const Plane e_aa = filter_valid(product(a, a), g);
  const Plane e_bb = filter_valid(product(b, b), g);
  const Plane e_ab = filter_valid(product(a, b), g);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.values.size(); ++i) {
    const double ma = mu_a.values[i];
    const double mb = mu_b.values[i];
    const double va = e_aa.values[i] - ma * ma;
    const double vb = e_bb.values[i] - mb * mb;
    const double cov = e_ab.values[i] - ma * mb;
    total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) / ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
  }
  return total / static_cast<double>(mu_a.values.size());
}

double ssim_y(const ImageRGB& a, const ImageRGB& b) {
  if (!a.same_dims(b)) throw std::invalid_argument("ssim_y: dims mismatch");
  return ssim(rgb_to_y(a), rgb_to_y(b));
}

MetricReport evaluate(const ImageRGB& output, const ImageRGB& ground_truth) {
  return {psnr_y(output, ground_truth), ssim_y(output, ground_truth)};
}

}  // namespace sargd
