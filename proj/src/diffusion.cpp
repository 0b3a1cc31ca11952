#include "sargd/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace sargd {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : beta_(std::move(betas)) {
  if (beta_.empty()) throw std::invalid_argument("NoiseSchedule: T must be >= 1");
  alpha_.reserve(beta_.size());
  alpha_bar_.reserve(beta_.size());
  double running = 1.0;
  for (double b : beta_) {
    if (!(b > 0.0 && b < 1.0)) {
      throw std::invalid_argument("NoiseSchedule: beta " + std::to_string(b) + " outside (0, 1)");
    }
    alpha_.push_back(1.0 - b);
    running *= 1.0 - b;
    alpha_bar_.push_back(running);
  }
}

void NoiseSchedule::require_step(std::size_t t) const {
  if (t < 1 || t > beta_.size()) {
    throw std::out_of_range("step " + std::to_string(t) + " outside [1, " +
                            std::to_string(beta_.size()) + "]");
  }
}

std::size_t NoiseSchedule::index(std::size_t t) const {
  require_step(t);
  return t - 1;
}

NoiseSchedule build_linear_schedule(std::size_t steps, double beta_start, double beta_end) {
  if (steps == 0) throw std::invalid_argument("build_linear_schedule: T must be >= 1");
  if (!(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end)) {
    throw std::invalid_argument("build_linear_schedule: need 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(steps);
  if (steps == 1) {
    betas[0] = beta_start;
  } else {
    const double span = beta_end - beta_start;
    for (std::size_t i = 0; i < steps; ++i) {
      betas[i] = beta_start + span * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
  }
  return NoiseSchedule(std::move(betas));
}

NoiseSchedule build_default_schedule(std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("build_default_schedule: T must be >= 1");
  const double rescale = 1000.0 / static_cast<double>(steps);
  const double lo = std::min(1e-4 * rescale, 0.999);
  const double hi = std::min(0.02 * rescale, 0.999);
  return build_linear_schedule(steps, lo, hi);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

LatentGrid sample_gaussian(const GridShape& shape, RngStream rng) {
  if (shape.count() == 0) throw std::invalid_argument("sample_gaussian: zero-sized shape");
  std::mt19937_64 engine(splitmix64(rng.seed ^ splitmix64(rng.stream_id)));
  std::normal_distribution<double> normal(0.0, 1.0);
  LatentGrid out(shape);
  for (auto& v : out.values()) v = normal(engine);
  return out;
}

LatentGrid forward_diffuse(const LatentGrid& x0, std::size_t t, const NoiseSchedule& schedule,
                           const LatentGrid& noise) {
  require_same_shape(x0, noise, "forward_diffuse");
  const double abar = schedule.alpha_bar(t);
  const double signal = std::sqrt(abar);
  const double spread = std::sqrt(1.0 - abar);
  LatentGrid out(x0.shape());
  auto o = out.values();
  auto a = x0.values();
  auto n = noise.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = signal * a[i] + spread * n[i];
  return out;
}

LatentGrid reverse_step(const LatentGrid& x_t, const LatentGrid& eps_hat, std::size_t t,
                        const NoiseSchedule& schedule, const LatentGrid& noise) {
  require_same_shape(x_t, eps_hat, "reverse_step");
  require_same_shape(x_t, noise, "reverse_step");
  const double alpha = schedule.alpha(t);
  const double abar = schedule.alpha_bar(t);
  if (t == 1 && !noise.all_zero()) {
    throw std::invalid_argument("reverse_step: noise must be zero at t = 1");
  }
  const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
  const double eps_coef = (1.0 - alpha) / std::sqrt(1.0 - abar);
  const double sigma = std::sqrt(1.0 - alpha);
  LatentGrid out(x_t.shape());
  auto o = out.values();
  auto x = x_t.values();
  auto e = eps_hat.values();
  auto n = noise.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = inv_sqrt_alpha * (x[i] - eps_coef * e[i]) + sigma * n[i];
  }
  return out;
}

}  // namespace sargd
