#include "sargd/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sargd {

LatentGrid posterior_mean(const AnalyticGaussian& d, const LatentGrid& x_t, const LatentGrid& cond,
                          std::size_t t, const NoiseSchedule& schedule) {
  if (!(d.prior_var > 0.0)) throw std::invalid_argument("analytic denoiser: prior_var must be > 0");
  const LatentGrid& mean = d.prior_mean ? *d.prior_mean : cond;
  require_same_shape(x_t, cond, "predict_noise");
  require_same_shape(x_t, mean, "predict_noise prior mean");
  const double abar = schedule.alpha_bar(t);
  const double v = d.prior_var;
  const double gain = v * std::sqrt(abar);
  const double pull = 1.0 - abar;
  const double norm = abar * v + 1.0 - abar;
  LatentGrid out(x_t.shape());
  auto o = out.values();
  auto x = x_t.values();
  auto mu = mean.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = (gain * x[i] + pull * mu[i]) / norm;
  return out;
}

namespace {

LatentGrid analytic_noise(const AnalyticGaussian& d, const LatentGrid& x_t, const LatentGrid& cond,
                          std::size_t t, const NoiseSchedule& schedule) {
  const LatentGrid x0 = posterior_mean(d, x_t, cond, t, schedule);
  const double abar = schedule.alpha_bar(t);
  const double signal = std::sqrt(abar);
  const double spread = std::sqrt(1.0 - abar);
  LatentGrid eps(x_t.shape());
  auto e = eps.values();
  auto x = x_t.values();
  auto m = x0.values();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (x[i] - signal * m[i]) / spread;
  return eps;
}

}  // namespace

LatentGrid predict_noise(const DenoiserSpec& d, const LatentGrid& x_t, const LatentGrid& cond,
                         std::size_t t, const NoiseSchedule& schedule) {
  schedule.require_step(t);
  if (const auto* g = std::get_if<AnalyticGaussian>(&d)) return analytic_noise(*g, x_t, cond, t, schedule);

  const auto& corruptor = std::get<Corruptor>(d);
  LatentGrid eps = analytic_noise(corruptor.inner, x_t, cond, t, schedule);
  const ArtifactSpec& a = corruptor.artifact;
  if (!a.active.contains(t) || a.region.empty()) return eps;
  validate_artifact(a, eps.height(), eps.width());

  const double amount =
      a.noise_scaled ? a.magnitude * std::sqrt(1.0 - schedule.alpha_bar(t)) : a.magnitude;
  const BinaryMask region = oracle_artifact_mask(a, eps.height(), eps.width());
  LatentGrid draw;
  if (a.mode == ArtifactMode::noise) draw = sample_gaussian(eps.shape(), RngStream{a.noise_seed, t});
  for (std::size_t c = 0; c < eps.channels(); ++c)
    for (std::size_t y = 0; y < eps.height(); ++y)
      for (std::size_t x = 0; x < eps.width(); ++x) {
        if (!region.at(y, x)) continue;
        eps.at(c, y, x) += a.mode == ArtifactMode::bias ? amount : amount * draw.at(c, y, x);
      }
  return eps;
}

void validate_artifact(const ArtifactSpec& a, std::size_t latent_height, std::size_t latent_width) {
  if (!(a.magnitude >= 0.0)) throw std::invalid_argument("artifact: magnitude must be >= 0");
  if (a.active.lo > a.active.hi) throw std::invalid_argument("artifact: empty active range");
  for (const Rect& r : a.region) {
    if (r.height == 0 || r.width == 0 || r.top + r.height > latent_height ||
        r.left + r.width > latent_width) {
      throw std::out_of_range("artifact rectangle (" + std::to_string(r.top) + "," +
                              std::to_string(r.left) + ") " + std::to_string(r.height) + "x" +
                              std::to_string(r.width) + " outside latent " +
                              std::to_string(latent_height) + "x" + std::to_string(latent_width));
    }
  }
}

BinaryMask oracle_artifact_mask(const ArtifactSpec& a, std::size_t latent_height,
                                std::size_t latent_width) {
  if (latent_height == 0 || latent_width == 0) throw std::invalid_argument("oracle mask: empty dims");
  validate_artifact(a, latent_height, latent_width);
  BinaryMask mask(latent_height, latent_width);
  for (const Rect& r : a.region)
    for (std::size_t y = r.top; y < r.top + r.height; ++y)
      for (std::size_t x = r.left; x < r.left + r.width; ++x) mask.set(y, x, true);
  return mask;
}

}  // namespace sargd
