#include "sargd/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sargd {

namespace {

void require_codec(const CodecSpec& codec) {
  if (codec.latent_channels != 3) {
    throw std::invalid_argument("codec: toy codecs carry exactly 3 latent channels");
  }
}

}  // namespace

GridShape latent_shape(const CodecSpec& codec, std::size_t image_height, std::size_t image_width) {
  require_codec(codec);
  if (image_height == 0 || image_width == 0) throw std::invalid_argument("codec: empty image");
  if (codec.kind == CodecKind::pool2x && (image_height % 2 != 0 || image_width % 2 != 0)) {
    throw std::invalid_argument("pool2x codec: image dims " + std::to_string(image_height) + "x" +
                                std::to_string(image_width) + " must be even");
  }
  const std::size_t f = codec.factor();
  return {codec.latent_channels, image_height / f, image_width / f};
}

LatentGrid encode(const ImageRGB& image, const CodecSpec& codec) {
  const GridShape shape = latent_shape(codec, image.height(), image.width());
  LatentGrid z(shape);
  if (codec.kind == CodecKind::identity) {
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < shape.height; ++y)
        for (std::size_t x = 0; x < shape.width; ++x) z.at(c, y, x) = image.at(y, x, c);
    return z;
  }
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < shape.height; ++y)
      for (std::size_t x = 0; x < shape.width; ++x) {
        const double sum = image.at(2 * y, 2 * x, c) + image.at(2 * y, 2 * x + 1, c) +
                           image.at(2 * y + 1, 2 * x, c) + image.at(2 * y + 1, 2 * x + 1, c);
        z.at(c, y, x) = 0.25 * sum;
      }
  return z;
}

ImageRGB decode(const LatentGrid& latent, const CodecSpec& codec) {
  require_codec(codec);
  if (latent.channels() != codec.latent_channels) {
    throw std::invalid_argument("decode: latent has " + std::to_string(latent.channels()) +
                                " channels, codec expects " + std::to_string(codec.latent_channels));
  }
  if (latent.height() == 0 || latent.width() == 0) throw std::invalid_argument("decode: empty latent");
  const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const std::size_t lh = latent.height();
  const std::size_t lw = latent.width();
  if (codec.kind == CodecKind::identity) {
    ImageRGB img(lh, lw);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < lh; ++y)
        for (std::size_t x = 0; x < lw; ++x) img.at(y, x, c) = clamp01(latent.at(c, y, x));
    return img;
  }

  // Bilinear 2x with half-pixel centres and edge clamping.
  struct Tap {
    std::size_t i0, i1;
    double w1;
  };
  const auto taps = [](std::size_t out_len, std::size_t in_len) {
    std::vector<Tap> t(out_len);
    for (std::size_t o = 0; o < out_len; ++o) {
      double src = (static_cast<double>(o) + 0.5) / 2.0 - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in_len - 1));
      const auto i0 = static_cast<std::size_t>(std::floor(src));
      const std::size_t i1 = std::min(i0 + 1, in_len - 1);
      t[o] = {i0, i1, src - static_cast<double>(i0)};
    }
    return t;
  };
  const auto ty = taps(2 * lh, lh);
  const auto tx = taps(2 * lw, lw);
  ImageRGB img(2 * lh, 2 * lw);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 2 * lh; ++y) {
      const Tap& a = ty[y];
      for (std::size_t x = 0; x < 2 * lw; ++x) {
        const Tap& b = tx[x];
        const double top = latent.at(c, a.i0, b.i0) * (1.0 - b.w1) + latent.at(c, a.i0, b.i1) * b.w1;
        const double bot = latent.at(c, a.i1, b.i0) * (1.0 - b.w1) + latent.at(c, a.i1, b.i1) * b.w1;
        img.at(y, x, c) = clamp01(top * (1.0 - a.w1) + bot * a.w1);
      }
    }
  return img;
}

double cubic_kernel(double x) {
  const double ax = std::abs(x);
  const double ax2 = ax * ax;
  const double ax3 = ax2 * ax;
  if (ax <= 1.0) return 1.5 * ax3 - 2.5 * ax2 + 1.0;
  if (ax <= 2.0) return -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0;
  return 0.0;
}

namespace {

struct Contribution {
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

// Per output sample: source indices (symmetric-mirrored) and normalized
// weights, following imresize's contributions().
std::vector<Contribution> contributions(std::size_t in_len, std::size_t out_len, double scale) {
  const bool shrink = scale < 1.0;
  const double width = shrink ? 4.0 / scale : 4.0;
  const auto kernel = [&](double x) { return shrink ? scale * cubic_kernel(scale * x) : cubic_kernel(x); };
  const auto taps = static_cast<long>(std::ceil(width)) + 2;
  const auto n = static_cast<long>(in_len);

  std::vector<Contribution> out(out_len);
  for (std::size_t o = 0; o < out_len; ++o) {
    // 1-based coordinates as in the reference formulation.
    const double u = static_cast<double>(o + 1) / scale + 0.5 * (1.0 - 1.0 / scale);
    const auto left = static_cast<long>(std::floor(u - width / 2.0));
    Contribution& c = out[o];
    double total = 0.0;
    for (long j = 0; j < taps; ++j) {
      const long idx = left + j;
      const double w = kernel(u - static_cast<double>(idx));
      if (w == 0.0) continue;
      // mirror into [1, n] with period 2n
      long m = (idx - 1) % (2 * n);
      if (m < 0) m += 2 * n;
      const long src = m < n ? m : 2 * n - 1 - m;
      c.index.push_back(static_cast<std::size_t>(src));
      c.weight.push_back(w);
      total += w;
    }
    for (double& w : c.weight) w /= total;
  }
  return out;
}

std::size_t scaled_length(std::size_t len, Scale scale) {
  const double v = std::round(static_cast<double>(len) * scale.value());
  if (v < 1.0) throw std::invalid_argument("bicubic_resize: degenerate output size");
  return static_cast<std::size_t>(v);
}

void require_scale(Scale scale) {
  if (scale.num == 0 || scale.den == 0) throw std::invalid_argument("bicubic_resize: scale must be > 0");
}

// Resizes `channels` interleaved planes of size h x w.
std::vector<double> resize_interleaved(const std::vector<double>& src, std::size_t h, std::size_t w,
                                       std::size_t channels, std::size_t oh, std::size_t ow,
                                       double scale) {
  const auto rows = contributions(h, oh, scale);
  const auto cols = contributions(w, ow, scale);
  std::vector<double> tmp(oh * w * channels, 0.0);
  for (std::size_t y = 0; y < oh; ++y) {
    const Contribution& c = rows[y];
    for (std::size_t k = 0; k < c.index.size(); ++k) {
      const double wt = c.weight[k];
      const double* in = &src[c.index[k] * w * channels];
      double* o = &tmp[y * w * channels];
      for (std::size_t i = 0; i < w * channels; ++i) o[i] += wt * in[i];
    }
  }
  std::vector<double> out(oh * ow * channels, 0.0);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      const Contribution& c = cols[x];
      double* o = &out[(y * ow + x) * channels];
      for (std::size_t k = 0; k < c.index.size(); ++k) {
        const double* in = &tmp[(y * w + c.index[k]) * channels];
        for (std::size_t ch = 0; ch < channels; ++ch) o[ch] += c.weight[k] * in[ch];
      }
    }
  return out;
}

}  // namespace

ImageRGB bicubic_resize(const ImageRGB& image, Scale scale) {
  require_scale(scale);
  if (image.empty()) throw std::invalid_argument("bicubic_resize: empty image");
  if (scale.num == scale.den) return image;
  const std::size_t oh = scaled_length(image.height(), scale);
  const std::size_t ow = scaled_length(image.width(), scale);
  std::vector<double> src(image.pixels().begin(), image.pixels().end());
  auto out = resize_interleaved(src, image.height(), image.width(), 3, oh, ow, scale.value());
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return ImageRGB(oh, ow, std::move(out));
}

Plane bicubic_resize(const Plane& plane, Scale scale) {
  require_scale(scale);
  if (plane.values.empty()) throw std::invalid_argument("bicubic_resize: empty plane");
  if (scale.num == scale.den) return plane;
  Plane out;
  out.height = scaled_length(plane.height, scale);
  out.width = scaled_length(plane.width, scale);
  out.values = resize_interleaved(plane.values, plane.height, plane.width, 1, out.height, out.width,
                                  scale.value());
  return out;
}

Plane rgb_to_y(const ImageRGB& image) {
  if (image.empty()) throw std::invalid_argument("rgb_to_y: empty image");
  Plane y(image.height(), image.width());
  for (std::size_t r = 0; r < image.height(); ++r)
    for (std::size_t c = 0; c < image.width(); ++c)
      y.at(r, c) = 0.299 * image.at(r, c, 0) + 0.587 * image.at(r, c, 1) + 0.114 * image.at(r, c, 2);
  return y;
}

}  // namespace sargd
