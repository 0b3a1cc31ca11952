#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sargd/codec.hpp"
#include "sargd/denoiser.hpp"
#include "sargd/detector.hpp"
#include "sargd/image.hpp"
#include "sargd/sampler.hpp"

namespace sargd {

/// One method row: which guidance machinery runs and when.
struct VariantSpec {
  std::string id;
  StepPolicy rgr_policy = StepPolicy::off;
  StepPolicy sag_policy = StepPolicy::off;
  BlendMode blend_mode = BlendMode::masked;
  bool uses_detector = true;
};

// Known ids: baseline, rgr_only, rgr_sag, rgr_<policy> (every_step, every_10,
// first_k, last_k), sag_<policy> (every_step, after_k), detector_on, detector_off.
VariantSpec variant_preset(const std::string& id);

struct ExperimentConfig {
  std::string dataset_dir;
  std::string output_dir = "out";
  std::vector<std::size_t> scales{4};
  std::vector<std::string> variants{"baseline", "rgr_only", "rgr_sag"};
  std::vector<std::string> rgr_sweep;   // extra rgr_<policy> rows
  std::vector<std::string> sag_sweep;   // extra sag_<policy> rows
  bool detector_ablation = false;       // adds detector_on / detector_off rows
  std::vector<std::size_t> step_sweep{25, 50, 75, 100, 150, 200};
  std::uint64_t master_seed = 0;

  std::size_t steps = 100;
  std::size_t rgr_k = 100;
  std::size_t sag_k = 100;
  CodecKind codec = CodecKind::identity;
  DetectorKind detector = DetectorKind::oracle;
  std::size_t patch = 5;
  double threshold = 0.1;

  bool corrupt = true;
  double prior_var = 1e-4;
  ArtifactMode artifact_mode = ArtifactMode::bias;
  double artifact_magnitude = 5.0;
  bool artifact_noise_scaled = false;
  double artifact_size = 0.25;  // rectangle side as a fraction of the latent side
  std::size_t artifact_count = 1;
  std::size_t artifact_t_lo = 1;
  std::size_t artifact_t_hi = 0;  // 0 = through the last step

  std::size_t workers = 1;
  bool record_wall_time = false;
  bool write_overlays = true;
  bool write_traces = true;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& text);
void validate_experiment_config(const ExperimentConfig& cfg);

std::vector<VariantSpec> expand_variants(const ExperimentConfig& cfg);

// Per-image seed shared by every variant and scale of that image so the
// method comparison is paired:
//   seed = splitmix64(master_seed ^ splitmix64(image_index + 1))
std::uint64_t derive_image_seed(std::uint64_t master_seed, std::size_t image_index);

// Crops to a multiple of `scale`, then antialiased bicubic downscale by 1/scale.
ImageRGB make_lr(const ImageRGB& hr, std::size_t scale);

// Artifact rectangles for one image, placed from the image seed.
ArtifactSpec make_artifact(const ExperimentConfig& cfg, std::uint64_t image_seed,
                           std::size_t latent_height, std::size_t latent_width,
                           std::size_t steps);

SamplerConfig make_sampler_config(const ExperimentConfig& cfg, const VariantSpec& variant,
                                  std::uint64_t image_seed, std::size_t latent_height,
                                  std::size_t latent_width, std::size_t steps);

struct DatasetImage {
  std::string id;
  ImageRGB hr;
};

// Reads every *.png in dir in filename order; unreadable files are skipped
// with a warning on stderr.
std::vector<DatasetImage> load_dataset(const std::string& dir);

struct RunRecord {
  std::string image_id;
  std::size_t image_index = 0;
  std::size_t scale = 0;
  std::string variant;
  double psnr_y = 0.0;
  double ssim_y = 0.0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::string trace_path;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
};

// Runs every image x scale x variant. Writes results.csv, summary.md,
// traces/ and overlays/ under output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<DatasetImage>& images);

struct SweepPoint {
  std::size_t steps = 0;
  double mean_psnr_y = 0.0;
};

// rgr_sag at each T in step_sweep on the first configured scale; writes
// step_sweep.csv sorted by T.
std::vector<SweepPoint> run_step_sweep(const ExperimentConfig& cfg);
std::vector<SweepPoint> run_step_sweep(const ExperimentConfig& cfg,
                                       const std::vector<DatasetImage>& images);

void write_results_csv(const std::string& path, const std::vector<RunRecord>& records);
std::string format_results_csv(const std::vector<RunRecord>& records);

struct SummaryRow {
  std::string variant;
  std::size_t scale = 0;
  std::size_t count = 0;
  double mean_psnr_y = 0.0;
  double mean_ssim_y = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

}  // namespace sargd
