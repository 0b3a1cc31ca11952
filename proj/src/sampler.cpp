#include "sargd/sampler.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sargd {

std::string_view to_string(StepPolicy p) {
  switch (p) {
    case StepPolicy::every_step: return "every_step";
    case StepPolicy::every_10: return "every_10";
    case StepPolicy::first_k: return "first_k";
    case StepPolicy::last_k: return "last_k";
    case StepPolicy::after_k: return "after_k";
    case StepPolicy::off: return "off";
  }
  return "off";
}

StepPolicy parse_step_policy(std::string_view s) {
  for (StepPolicy p : {StepPolicy::every_step, StepPolicy::every_10, StepPolicy::first_k,
                       StepPolicy::last_k, StepPolicy::after_k, StepPolicy::off}) {
    if (s == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown step policy '" + std::string(s) + "'");
}

std::string_view to_string(BlendMode m) { return m == BlendMode::masked ? "masked" : "direct_sum"; }

namespace {

bool uses_k(StepPolicy p) {
  return p == StepPolicy::first_k || p == StepPolicy::last_k || p == StepPolicy::after_k;
}

}  // namespace

bool policy_active(StepPolicy policy, std::size_t k, std::size_t t, std::size_t total_steps) {
  if (t < 1 || t > total_steps) throw std::out_of_range("policy_active: t outside [1, T]");
  if (uses_k(policy) && k > total_steps) throw std::invalid_argument("policy_active: k > T");
  switch (policy) {
    case StepPolicy::every_step: return true;
    case StepPolicy::every_10: return (total_steps - t) % 10 == 0;
    case StepPolicy::last_k:
    case StepPolicy::after_k: return t <= k;
    case StepPolicy::first_k: return t > total_steps - k;
    case StepPolicy::off: return false;
  }
  return false;
}

void validate_config(const SamplerConfig& cfg) {
  if (cfg.steps == 0) throw std::invalid_argument("sampler: T must be >= 1");
  if (cfg.schedule && cfg.schedule->total_steps() != cfg.steps) {
    throw std::invalid_argument("sampler: schedule length differs from T");
  }
  if (cfg.rgr_policy == StepPolicy::after_k) {
    throw std::invalid_argument("sampler: after_k is a guidance-update policy; use last_k for refinement");
  }
  if (cfg.sag_policy == StepPolicy::every_10 || cfg.sag_policy == StepPolicy::first_k ||
      cfg.sag_policy == StepPolicy::last_k) {
    throw std::invalid_argument("sampler: guidance updates support every_step, after_k or off");
  }
  if (uses_k(cfg.rgr_policy) && cfg.rgr_k > cfg.steps) throw std::invalid_argument("sampler: rgr k > T");
  if (uses_k(cfg.sag_policy) && cfg.sag_k > cfg.steps) throw std::invalid_argument("sampler: sag k > T");
  if (cfg.sag_policy != StepPolicy::off && detector_kind(cfg.detector) == DetectorKind::none) {
    throw std::invalid_argument("sampler: guidance updates need a detector");
  }
  if (cfg.initial_score && !(*cfg.initial_score >= 0.0 && *cfg.initial_score <= 1.0)) {
    throw std::invalid_argument("sampler: initial_score must lie in [0, 1]");
  }
  validate_detector(cfg.detector);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t,s_r,artifact_fraction,rgr_applied,sag_updated\n";
  out << std::setprecision(10);
  for (const auto& r : trace.records) {
    out << r.t << ',' << r.s_r << ',' << r.artifact_fraction << ',' << (r.rgr_applied ? 1 : 0) << ','
        << (r.sag_updated ? 1 : 0) << '\n';
  }
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path);
  write_trace_csv(out, trace);
}

namespace {

// Artifact mask at latent scale (max-pooled from image scale).
BinaryMask latent_artifact_mask(const DetectorSpec& det, const ImageRGB& image, const ImageRGB& reference,
                                const GridShape& shape) {
  return resize_mask_to_latent(detect_artifacts(det, image, reference), shape.height, shape.width);
}

}  // namespace

Initialization initialize(const ImageRGB& lr, Scale scale, const SamplerConfig& cfg) {
  const ImageRGB up = bicubic_resize(lr, scale);
  Initialization init;
  init.cond = encode(up, cfg.codec);
  init.state.x_r = init.cond;
  if (cfg.initial_score) {
    init.state.s_r = RealityScore{*cfg.initial_score};
  } else if (detector_kind(cfg.detector) == DetectorKind::none) {
    init.state.s_r = RealityScore{1.0};
  } else {
    // No separate reference exists yet: the guidance is judged against itself.
    const ImageRGB decoded = decode(init.cond, cfg.codec);
    init.state.s_r =
        reality_score(latent_artifact_mask(cfg.detector, decoded, decoded, init.cond.shape()).inverted());
  }
  return init;
}

LatentGrid rgr_refine(const LatentGrid& x, const BinaryMask& artifact_mask, const LatentGrid& x_r) {
  require_same_shape(x, x_r, "rgr_refine");
  if (artifact_mask.height() != x.height() || artifact_mask.width() != x.width()) {
    throw std::invalid_argument("rgr_refine: mask dims differ from latent spatial dims");
  }
  LatentGrid out = x;
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t y = 0; y < x.height(); ++y)
      for (std::size_t i = 0; i < x.width(); ++i)
        if (artifact_mask.at(y, i)) out.at(c, y, i) = x_r.at(c, y, i);
  return out;
}

LatentGrid direct_sum_refine(const LatentGrid& x, const LatentGrid& x_r) {
  require_same_shape(x, x_r, "direct_sum_refine");
  LatentGrid out(x.shape());
  auto o = out.values();
  auto a = x.values();
  auto b = x_r.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.5 * (a[i] + b[i]);
  return out;
}

GuidanceState sag_update(const GuidanceState& state, const LatentGrid& x_r_new, const BinaryMask& reality,
                         RealityScore s_new) {
  require_same_shape(state.x_r, x_r_new, "sag_update");
  if (reality.height() != x_r_new.height() || reality.width() != x_r_new.width()) {
    throw std::invalid_argument("sag_update: reality mask dims differ from latent spatial dims");
  }
  if (!(s_new > state.s_r)) return state;
  // Same element-wise selection as the refinement blend, with roles swapped.
  return GuidanceState{rgr_refine(state.x_r, reality, x_r_new), s_new};
}

SargdResult run_sargd(const ImageRGB& lr, Scale scale, const SamplerConfig& cfg, StepObserver* observer) {
  validate_config(cfg);
  const NoiseSchedule schedule = cfg.schedule ? *cfg.schedule : build_default_schedule(cfg.steps);
  const std::size_t T = cfg.steps;
  const bool has_detector = detector_kind(cfg.detector) != DetectorKind::none;

  Initialization init = initialize(lr, scale, cfg);
  const LatentGrid& cond = init.cond;
  GuidanceState state = std::move(init.state);
  const GridShape shape = cond.shape();
  const RngStream rng{cfg.seed, 0};

  // Decoded guidance is the detector reference; refreshed only when x_r changes.
  ImageRGB reference;
  if (has_detector) reference = decode(state.x_r, cfg.codec);

  SargdResult result;
  result.trace.records.reserve(T);
  LatentGrid x = sample_gaussian(shape, rng);
  const LatentGrid zeros(shape);

  for (std::size_t t = T; t >= 1; --t) {
    TraceRecord rec;
    rec.t = t;
    const LatentGrid noise = t > 1 ? sample_gaussian(shape, rng.with_stream(t)) : zeros;
    const LatentGrid eps = predict_noise(cfg.denoiser, x, cond, t, schedule);
    x = reverse_step(x, eps, t, schedule, noise);

    if (policy_active(cfg.rgr_policy, cfg.rgr_k, t, T)) {
      if (cfg.blend_mode == BlendMode::direct_sum) {
        x = direct_sum_refine(x, state.x_r);
        rec.rgr_applied = true;
      } else if (has_detector) {
        const BinaryMask artifacts = latent_artifact_mask(cfg.detector, decode(x, cfg.codec), reference, shape);
        x = rgr_refine(x, artifacts, state.x_r);
        rec.artifact_fraction = artifacts.fraction_ones();
        rec.rgr_applied = true;
        if (observer) observer->after_refine(t, x, artifacts, state.x_r);
      }
    }

    if (policy_active(cfg.sag_policy, cfg.sag_k, t, T)) {
      const ImageRGB realistic = decode(x, cfg.codec);
      const BinaryMask reality = latent_artifact_mask(cfg.detector, realistic, reference, shape).inverted();
      const RealityScore s_new = reality_score(reality);
      if (s_new > state.s_r) {
        state = sag_update(state, encode(realistic, cfg.codec), reality, s_new);
        reference = decode(state.x_r, cfg.codec);
        rec.sag_updated = true;
      }
    }

    rec.s_r = state.s_r.value;
    result.trace.records.push_back(rec);
  }

  result.image = decode(x, cfg.codec);
  result.final_guidance = std::move(state);
  return result;
}

}  // namespace sargd
