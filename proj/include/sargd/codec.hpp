#pragma once

#include <cstddef>

#include "sargd/image.hpp"
#include "sargd/latent.hpp"

namespace sargd {

enum class CodecKind { identity, pool2x };

/// Deterministic stand-in for a VAE encoder/decoder pair.
///  identity: latent is the image, channel-planar.
///  pool2x:   latent cell = mean of a 2x2 pixel block; decode upsamples bilinearly.
struct CodecSpec {
  CodecKind kind = CodecKind::identity;
  std::size_t latent_channels = 3;

  std::size_t factor() const { return kind == CodecKind::pool2x ? 2 : 1; }
};

GridShape latent_shape(const CodecSpec& codec, std::size_t image_height, std::size_t image_width);

LatentGrid encode(const ImageRGB& image, const CodecSpec& codec);
ImageRGB decode(const LatentGrid& latent, const CodecSpec& codec);

/// Positive rational resize factor.
struct Scale {
  std::size_t num = 1;
  std::size_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Keys cubic convolution kernel, a = -0.5.
double cubic_kernel(double x);

// imresize-style bicubic: antialiased when shrinking, symmetric borders,
// output dims round(input * scale). Output is clamped to [0, 1].
ImageRGB bicubic_resize(const ImageRGB& image, Scale scale);
Plane bicubic_resize(const Plane& plane, Scale scale);

// BT.601 luma.
Plane rgb_to_y(const ImageRGB& image);

}  // namespace sargd
