#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sargd/codec.hpp"
#include "sargd/denoiser.hpp"
#include "sargd/detector.hpp"
#include "sargd/diffusion.hpp"
#include "sargd/image.hpp"
#include "sargd/latent.hpp"

namespace sargd {

/// When a refinement or guidance update fires within the reverse loop.
/// The loop counts t down from T, so last_k/after_k cover t <= k and
/// first_k covers t > T - k.
enum class StepPolicy { every_step, every_10, first_k, last_k, after_k, off };

std::string_view to_string(StepPolicy p);
StepPolicy parse_step_policy(std::string_view s);

bool policy_active(StepPolicy policy, std::size_t k, std::size_t t, std::size_t total_steps);

enum class BlendMode { masked, direct_sum };

std::string_view to_string(BlendMode m);

struct SamplerConfig {
  std::size_t steps = 200;
  StepPolicy rgr_policy = StepPolicy::every_step;
  std::size_t rgr_k = 100;
  StepPolicy sag_policy = StepPolicy::every_step;
  std::size_t sag_k = 100;
  DetectorSpec detector = NoDetector{};
  BlendMode blend_mode = BlendMode::masked;
  CodecSpec codec;
  DenoiserSpec denoiser = AnalyticGaussian{};
  std::uint64_t seed = 0;
  // Defaults to build_default_schedule(steps).
  std::optional<NoiseSchedule> schedule;
  // Replaces the detector self-comparison used for the starting reality score.
  std::optional<double> initial_score;
};

void validate_config(const SamplerConfig& cfg);

struct GuidanceState {
  LatentGrid x_r;
  RealityScore s_r;
};

struct TraceRecord {
  std::size_t t = 0;
  double s_r = 0.0;
  // Fraction of latent cells flagged on this step; kNotDetected otherwise.
  double artifact_fraction = -1.0;
  bool rgr_applied = false;
  bool sag_updated = false;
};

inline constexpr double kNotDetected = -1.0;

struct Trace {
  std::vector<TraceRecord> records;
};

void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::string& path, const Trace& trace);

struct Initialization {
  LatentGrid cond;
  GuidanceState state;
};

Initialization initialize(const ImageRGB& lr, Scale scale, const SamplerConfig& cfg);

// x * (1 - mask) + x_r * mask, mask broadcast across channels.
LatentGrid rgr_refine(const LatentGrid& x, const BinaryMask& artifact_mask, const LatentGrid& x_r);

// (x + x_r) / 2
LatentGrid direct_sum_refine(const LatentGrid& x, const LatentGrid& x_r);

// Replaces guidance inside the reality mask only when s_new is strictly
// higher than the current score.
GuidanceState sag_update(const GuidanceState& state, const LatentGrid& x_r_new,
                         const BinaryMask& reality, RealityScore s_new);

struct SargdResult {
  ImageRGB image;
  Trace trace;
  GuidanceState final_guidance;
};

/// Observer for per-step inspection; receives the latent immediately after
/// refinement along with the latent-scale artifact mask used for it.
struct StepObserver {
  virtual ~StepObserver() = default;
  virtual void after_refine(std::size_t t, const LatentGrid& x, const BinaryMask& latent_mask,
                            const LatentGrid& x_r) = 0;
};

SargdResult run_sargd(const ImageRGB& lr, Scale scale, const SamplerConfig& cfg,
                      StepObserver* observer = nullptr);

}  // namespace sargd
