#include "sargd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sargd/config.hpp"
#include "sargd/diffusion.hpp"
#include "sargd/metrics.hpp"
#include "sargd/png_io.hpp"

namespace fs = std::filesystem;

namespace sargd {

VariantSpec variant_preset(const std::string& id) {
  VariantSpec v;
  v.id = id;
  if (id == "baseline") {
    v.uses_detector = false;
    return v;
  }
  if (id == "rgr_only") {
    v.rgr_policy = StepPolicy::every_step;
    return v;
  }
  if (id == "rgr_sag" || id == "detector_on") {
    v.rgr_policy = StepPolicy::every_step;
    v.sag_policy = StepPolicy::every_step;
    return v;
  }
  if (id == "detector_off") {
    v.rgr_policy = StepPolicy::every_step;
    v.blend_mode = BlendMode::direct_sum;
    v.uses_detector = false;
    return v;
  }
  if (id.starts_with("rgr_")) {
    const StepPolicy p = parse_step_policy(id.substr(4));
    if (p == StepPolicy::off || p == StepPolicy::after_k) throw std::invalid_argument("unknown variant '" + id + "'");
    v.rgr_policy = p;
    v.sag_policy = StepPolicy::every_step;
    return v;
  }
  if (id.starts_with("sag_")) {
    const StepPolicy p = parse_step_policy(id.substr(4));
    if (p != StepPolicy::every_step && p != StepPolicy::after_k) {
      throw std::invalid_argument("unknown variant '" + id + "'");
    }
    v.rgr_policy = StepPolicy::every_step;
    v.sag_policy = p;
    return v;
  }
  throw std::invalid_argument("unknown variant '" + id + "'");
}

namespace {

std::vector<std::size_t> to_sizes(const std::vector<std::string>& items, const char* key) {
  std::vector<std::size_t> out;
  for (const auto& s : items) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("config key '") + key + "': '" + s + "' is not a count");
    }
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "dataset_dir", "output_dir", "scales", "variants", "rgr_sweep", "sag_sweep",
      "detector_ablation", "step_sweep", "master_seed", "steps", "rgr_k", "sag_k", "codec",
      "detector", "patch", "threshold", "denoiser", "prior_var", "artifact_mode",
      "artifact_magnitude", "artifact_noise_scaled", "artifact_size", "artifact_count",
      "artifact_t_lo", "artifact_t_hi", "workers", "record_wall_time", "write_overlays",
      "write_traces"};
  return keys;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  const KeyValueConfig kv = KeyValueConfig::parse(text);
  for (const auto& key : kv.keys()) {
    if (!known_keys().count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  c.dataset_dir = kv.get_string("dataset_dir", c.dataset_dir);
  c.output_dir = kv.get_string("output_dir", c.output_dir);
  if (kv.has("scales")) c.scales = to_sizes(kv.get_list("scales", {}), "scales");
  c.variants = kv.get_list("variants", c.variants);
  c.rgr_sweep = kv.get_list("rgr_sweep", c.rgr_sweep);
  c.sag_sweep = kv.get_list("sag_sweep", c.sag_sweep);
  c.detector_ablation = kv.get_bool("detector_ablation", c.detector_ablation);
  if (kv.has("step_sweep")) c.step_sweep = to_sizes(kv.get_list("step_sweep", {}), "step_sweep");
  c.master_seed = kv.get_uint("master_seed", c.master_seed);
  c.steps = kv.get_uint("steps", c.steps);
  c.rgr_k = kv.get_uint("rgr_k", c.rgr_k);
  c.sag_k = kv.get_uint("sag_k", c.sag_k);

  const std::string codec = kv.get_string("codec", c.codec == CodecKind::pool2x ? "pool2x" : "identity");
  if (codec == "identity") c.codec = CodecKind::identity;
  else if (codec == "pool2x") c.codec = CodecKind::pool2x;
  else throw std::invalid_argument("codec must be identity or pool2x");

  const std::string det = kv.get_string("detector", "oracle");
  if (det == "oracle") c.detector = DetectorKind::oracle;
  else if (det == "stat_divergence") c.detector = DetectorKind::stat_divergence;
  else if (det == "none") c.detector = DetectorKind::none;
  else throw std::invalid_argument("detector must be oracle, stat_divergence or none");
  c.patch = kv.get_uint("patch", c.patch);
  c.threshold = kv.get_double("threshold", c.threshold);

  const std::string denoiser = kv.get_string("denoiser", c.corrupt ? "corruptor" : "analytic");
  if (denoiser == "corruptor") c.corrupt = true;
  else if (denoiser == "analytic") c.corrupt = false;
  else throw std::invalid_argument("denoiser must be analytic or corruptor");
  c.prior_var = kv.get_double("prior_var", c.prior_var);

  const std::string mode = kv.get_string("artifact_mode", "bias");
  if (mode == "bias") c.artifact_mode = ArtifactMode::bias;
  else if (mode == "noise") c.artifact_mode = ArtifactMode::noise;
  else throw std::invalid_argument("artifact_mode must be bias or noise");
  c.artifact_magnitude = kv.get_double("artifact_magnitude", c.artifact_magnitude);
  c.artifact_noise_scaled = kv.get_bool("artifact_noise_scaled", c.artifact_noise_scaled);
  c.artifact_size = kv.get_double("artifact_size", c.artifact_size);
  c.artifact_count = kv.get_uint("artifact_count", c.artifact_count);
  c.artifact_t_lo = kv.get_uint("artifact_t_lo", c.artifact_t_lo);
  c.artifact_t_hi = kv.get_uint("artifact_t_hi", c.artifact_t_hi);

  c.workers = kv.get_uint("workers", c.workers);
  c.record_wall_time = kv.get_bool("record_wall_time", c.record_wall_time);
  c.write_overlays = kv.get_bool("write_overlays", c.write_overlays);
  c.write_traces = kv.get_bool("write_traces", c.write_traces);
  validate_experiment_config(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

void validate_experiment_config(const ExperimentConfig& c) {
  if (c.scales.empty()) throw std::invalid_argument("config: scales must not be empty");
  for (std::size_t s : c.scales) {
    if (s < 2 || s > 4) throw std::invalid_argument("config: scales must be drawn from {2, 3, 4}");
  }
  for (std::size_t t : c.step_sweep) {
    if (t < 10) throw std::invalid_argument("config: step sweep values must be >= 10");
  }
  if (c.steps == 0) throw std::invalid_argument("config: steps must be >= 1");
  if (c.workers == 0) throw std::invalid_argument("config: workers must be >= 1");
  if (!(c.prior_var > 0.0)) throw std::invalid_argument("config: prior_var must be > 0");
  if (!(c.artifact_size > 0.0 && c.artifact_size <= 1.0)) {
    throw std::invalid_argument("config: artifact_size must be in (0, 1]");
  }
  if (!(c.artifact_magnitude >= 0.0)) throw std::invalid_argument("config: artifact_magnitude must be >= 0");
  if (c.artifact_t_hi != 0 && c.artifact_t_hi < c.artifact_t_lo) {
    throw std::invalid_argument("config: artifact_t_hi < artifact_t_lo");
  }
  if (c.detector == DetectorKind::stat_divergence) validate_detector(StatDivergenceDetector{c.patch, c.threshold});
  for (const auto& v : expand_variants(c)) {
    if (v.sag_policy != StepPolicy::off && c.detector == DetectorKind::none) {
      throw std::invalid_argument("config: variant '" + v.id + "' updates guidance but detector = none");
    }
  }
}

std::vector<VariantSpec> expand_variants(const ExperimentConfig& cfg) {
  std::vector<std::string> ids = cfg.variants;
  for (const auto& p : cfg.rgr_sweep) ids.push_back("rgr_" + p);
  for (const auto& p : cfg.sag_sweep) ids.push_back("sag_" + p);
  if (cfg.detector_ablation) {
    ids.push_back("detector_on");
    ids.push_back("detector_off");
  }
  std::vector<VariantSpec> out;
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) continue;
    out.push_back(variant_preset(id));
  }
  if (out.empty()) throw std::invalid_argument("config: no variants selected");
  return out;
}

std::uint64_t derive_image_seed(std::uint64_t master_seed, std::size_t image_index) {
  return splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(image_index) + 1));
}

ImageRGB make_lr(const ImageRGB& hr, std::size_t scale) {
  if (scale == 0) throw std::invalid_argument("make_lr: scale must be >= 1");
  if (hr.height() < scale || hr.width() < scale) throw std::invalid_argument("make_lr: image smaller than scale");
  const ImageRGB cropped = center_crop(hr, hr.height() / scale * scale, hr.width() / scale * scale);
  return bicubic_resize(cropped, Scale{1, scale});
}

ArtifactSpec make_artifact(const ExperimentConfig& cfg, std::uint64_t image_seed, std::size_t latent_height,
                           std::size_t latent_width, std::size_t steps) {
  ArtifactSpec a;
  a.mode = cfg.artifact_mode;
  a.magnitude = cfg.artifact_magnitude;
  a.noise_scaled = cfg.artifact_noise_scaled;
  a.active = {cfg.artifact_t_lo, cfg.artifact_t_hi == 0 ? steps : cfg.artifact_t_hi};
  a.noise_seed = splitmix64(image_seed ^ 0x6172746966616374ULL);
  std::mt19937_64 rng(splitmix64(image_seed ^ 0x7265676F6E000000ULL));
  const auto side = [&](std::size_t n) {
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(cfg.artifact_size * n)), 1, n);
  };
  const std::size_t h = side(latent_height);
  const std::size_t w = side(latent_width);
  for (std::size_t i = 0; i < cfg.artifact_count; ++i) {
    const std::size_t top = rng() % (latent_height - h + 1);
    const std::size_t left = rng() % (latent_width - w + 1);
    a.region.push_back({top, left, h, w});
  }
  return a;
}

namespace {

DetectorSpec configured_detector(const ExperimentConfig& cfg, const ArtifactSpec& truth, std::size_t latent_height,
                                 std::size_t latent_width) {
  switch (cfg.detector) {
    case DetectorKind::oracle: return OracleDetector{truth, latent_height, latent_width};
    case DetectorKind::stat_divergence: return StatDivergenceDetector{cfg.patch, cfg.threshold};
    case DetectorKind::none: break;
  }
  return NoDetector{};
}

}  // namespace

SamplerConfig make_sampler_config(const ExperimentConfig& cfg, const VariantSpec& variant,
                                  std::uint64_t image_seed, std::size_t latent_height, std::size_t latent_width,
                                  std::size_t steps) {
  SamplerConfig s;
  s.steps = steps;
  s.rgr_policy = variant.rgr_policy;
  s.rgr_k = cfg.rgr_k;
  s.sag_policy = variant.sag_policy;
  s.sag_k = cfg.sag_k;
  s.blend_mode = variant.blend_mode;
  s.codec = CodecSpec{cfg.codec, 3};
  s.seed = image_seed;

  ArtifactSpec truth;
  if (cfg.corrupt) {
    truth = make_artifact(cfg, image_seed, latent_height, latent_width, steps);
    s.denoiser = Corruptor{AnalyticGaussian{cfg.prior_var, std::nullopt}, truth};
  } else {
    s.denoiser = AnalyticGaussian{cfg.prior_var, std::nullopt};
  }

  if (variant.uses_detector) s.detector = configured_detector(cfg, truth, latent_height, latent_width);
  return s;
}

std::vector<DatasetImage> load_dataset(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("dataset directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DatasetImage> out;
  for (const auto& f : files) {
    try {
      out.push_back({f.stem().string(), read_png(f.string())});
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << f.string() << ": " << e.what() << "\n";
    }
  }
  if (out.empty()) throw std::runtime_error("dataset directory '" + dir + "' has no readable PNG images");
  return out;
}

namespace {

std::size_t crop_multiple(std::size_t scale, const CodecSpec& codec) {
  return std::lcm(scale, codec.factor());
}

ImageRGB overlay(const ImageRGB& image, const BinaryMask& mask) {
  ImageRGB out = image;
  for (std::size_t y = 0; y < image.height(); ++y)
    for (std::size_t x = 0; x < image.width(); ++x) {
      if (!mask.at(y, x)) continue;
      out.at(y, x, 0) = 0.5 * out.at(y, x, 0) + 0.5;
      out.at(y, x, 1) = 0.5 * out.at(y, x, 1);
      out.at(y, x, 2) = 0.5 * out.at(y, x, 2);
    }
  return out;
}

// Runs f(i) for i in [0, n) on `workers` threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(workers, n));
  if (count == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < count; ++i) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

struct Job {
  std::size_t image;
  std::size_t scale;
  std::size_t variant;
};

std::string run_name(const std::string& image_id, std::size_t scale, const std::string& variant) {
  return image_id + "_x" + std::to_string(scale) + "_" + variant;
}

RunRecord run_one(const ExperimentConfig& cfg, const DatasetImage& img, std::size_t index, std::size_t scale,
                  const VariantSpec& variant, std::size_t steps, bool write_outputs) {
  const CodecSpec codec{cfg.codec, 3};
  const std::size_t m = crop_multiple(scale, codec);
  if (img.hr.height() < m || img.hr.width() < m) {
    throw std::runtime_error("image " + img.id + " is smaller than the crop multiple");
  }
  const ImageRGB hr = center_crop(img.hr, img.hr.height() / m * m, img.hr.width() / m * m);
  const ImageRGB lr = make_lr(hr, scale);
  const GridShape latent = latent_shape(codec, hr.height(), hr.width());
  const std::uint64_t seed = derive_image_seed(cfg.master_seed, index);
  const SamplerConfig sc = make_sampler_config(cfg, variant, seed, latent.height, latent.width, steps);

  const auto start = std::chrono::steady_clock::now();
  const SargdResult result = run_sargd(lr, Scale{scale, 1}, sc);
  const auto stop = std::chrono::steady_clock::now();
  const MetricReport metrics = evaluate(result.image, hr);

  RunRecord rec;
  rec.image_id = img.id;
  rec.image_index = index;
  rec.scale = scale;
  rec.variant = variant.id;
  rec.psnr_y = metrics.psnr_y;
  rec.ssim_y = metrics.ssim_y;
  rec.wall_ms =
      cfg.record_wall_time ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
  rec.seed = seed;

  if (!write_outputs) return rec;
  const fs::path out(cfg.output_dir);
  const std::string name = run_name(img.id, scale, variant.id);
  if (cfg.write_traces) {
    rec.trace_path = (out / "traces" / (name + ".csv")).string();
    write_trace_csv(rec.trace_path, result.trace);
  }
  if (cfg.write_overlays && cfg.detector != DetectorKind::none) {
    // Applied post hoc, so rows that ran without a detector get an overlay too.
    const ArtifactSpec truth =
        cfg.corrupt ? make_artifact(cfg, seed, latent.height, latent.width, steps) : ArtifactSpec{};
    const DetectorSpec det = configured_detector(cfg, truth, latent.height, latent.width);
    const ImageRGB reference = decode(result.final_guidance.x_r, codec);
    const BinaryMask mask = detect_artifacts(det, result.image, reference);
    write_png((out / "overlays" / (name + ".png")).string(), overlay(result.image, mask));
  }
  return rec;
}

std::string format_double(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

void write_summary(const std::string& path, const ExperimentConfig& cfg, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# Results\n\n";
  out << "T = " << cfg.steps << ", master seed = " << cfg.master_seed << "\n\n";
  out << "| variant | scale | images | PSNR-Y (dB) | SSIM-Y | dPSNR vs baseline |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    std::string delta = "-";
    for (const auto& b : rows) {
      if (b.variant == "baseline" && b.scale == r.scale) delta = format_double(r.mean_psnr_y - b.mean_psnr_y, 2);
    }
    out << "| " << r.variant << " | x" << r.scale << " | " << r.count << " | " << format_double(r.mean_psnr_y, 4)
        << " | " << format_double(r.mean_ssim_y, 4) << " | " << delta << " |\n";
  }
}

}  // namespace

std::string format_results_csv(const std::vector<RunRecord>& records) {
  std::string s = "image,scale,variant,psnr_y,ssim_y,wall_ms,seed\n";
  for (const auto& r : records) {
    s += r.image_id + "," + std::to_string(r.scale) + "," + r.variant + "," + format_double(r.psnr_y, 6) + "," +
         format_double(r.ssim_y, 6) + "," + format_double(r.wall_ms, 3) + "," + std::to_string(r.seed) + "\n";
  }
  return s;
}

void write_results_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_results_csv(records);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<SummaryRow> rows;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const SummaryRow& s) { return s.variant == r.variant && s.scale == r.scale; });
    if (it == rows.end()) {
      rows.push_back({r.variant, r.scale, 0, 0.0, 0.0});
      it = rows.end() - 1;
    }
    ++it->count;
    it->mean_psnr_y += r.psnr_y;
    it->mean_ssim_y += r.ssim_y;
  }
  for (auto& s : rows) {
    s.mean_psnr_y /= static_cast<double>(s.count);
    s.mean_ssim_y /= static_cast<double>(s.count);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) { return a.scale < b.scale; });
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  return run_experiment(cfg, load_dataset(cfg.dataset_dir));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<DatasetImage>& images) {
  validate_experiment_config(cfg);
  if (images.empty()) throw std::invalid_argument("run_experiment: empty dataset");
  const auto variants = expand_variants(cfg);
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  if (cfg.write_traces) fs::create_directories(out / "traces");
  if (cfg.write_overlays && cfg.detector != DetectorKind::none) fs::create_directories(out / "overlays");

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t s : cfg.scales)
      for (std::size_t v = 0; v < variants.size(); ++v) jobs.push_back({i, s, v});

  ExperimentResult result;
  result.records.resize(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t j) {
    const Job& job = jobs[j];
    result.records[j] = run_one(cfg, images[job.image], job.image, job.scale, variants[job.variant], cfg.steps, true);
  });

  write_results_csv((out / "results.csv").string(), result.records);
  write_summary((out / "summary.md").string(), cfg, summarize(result.records));
  return result;
}

std::vector<SweepPoint> run_step_sweep(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  return run_step_sweep(cfg, load_dataset(cfg.dataset_dir));
}

std::vector<SweepPoint> run_step_sweep(const ExperimentConfig& cfg, const std::vector<DatasetImage>& images) {
  validate_experiment_config(cfg);
  if (cfg.step_sweep.empty()) throw std::invalid_argument("run_step_sweep: step sweep is empty");
  if (images.empty()) throw std::invalid_argument("run_step_sweep: empty dataset");
  std::vector<std::size_t> steps = cfg.step_sweep;
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  const VariantSpec variant = variant_preset("rgr_sag");
  const std::size_t scale = cfg.scales.front();

  std::vector<double> psnr(steps.size() * images.size());
  parallel_for(psnr.size(), cfg.workers, [&](std::size_t j) {
    const std::size_t si = j / images.size();
    const std::size_t ii = j % images.size();
    psnr[j] = run_one(cfg, images[ii], ii, scale, variant, steps[si], false).psnr_y;
  });

  std::vector<SweepPoint> points;
  for (std::size_t si = 0; si < steps.size(); ++si) {
    double total = 0.0;
    for (std::size_t ii = 0; ii < images.size(); ++ii) total += psnr[si * images.size() + ii];
    points.push_back({steps[si], total / static_cast<double>(images.size())});
  }

  fs::create_directories(cfg.output_dir);
  std::ofstream csv(fs::path(cfg.output_dir) / "step_sweep.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write step_sweep.csv");
  csv << "T,mean_psnr_y\n";
  for (const auto& p : points) csv << p.steps << "," << format_double(p.mean_psnr_y, 6) << "\n";
  return points;
}

}  // namespace sargd
