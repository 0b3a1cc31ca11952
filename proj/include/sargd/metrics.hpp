#pragma once

#include "sargd/image.hpp"

namespace sargd {

struct MetricReport {
  double psnr_y = 0.0;  // +inf when the Y planes are identical
  double ssim_y = 0.0;
};

// Peak 1.0, computed on BT.601 luma.
double psnr_y(const ImageRGB& a, const ImageRGB& b);

// Mean SSIM over all valid 11x11 Gaussian (sigma 1.5) windows on luma,
// C1 = 0.01^2, C2 = 0.03^2.
double ssim_y(const ImageRGB& a, const ImageRGB& b);

double ssim(const Plane& a, const Plane& b);
double mse(const Plane& a, const Plane& b);

MetricReport evaluate(const ImageRGB& output, const ImageRGB& ground_truth);

}  // namespace sargd
