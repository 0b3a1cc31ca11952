#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sargd/codec.hpp"
#include "sargd/config.hpp"
#include "sargd/corpus.hpp"
#include "sargd/experiment.hpp"
#include "sargd/png_io.hpp"

using namespace sargd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sargd_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.output_dir = out.string();
  cfg.scales = {2};
  cfg.steps = 20;
  cfg.write_overlays = true;
  cfg.write_traces = true;
  return cfg;
}

std::vector<DatasetImage> small_dataset(std::size_t n) {
  std::vector<DatasetImage> images;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "img_%03zu", i);
    images.push_back({id, center_crop(synthetic_image(i, 5), 32, 32)});
  }
  return images;
}

}  // namespace

TEST_CASE("key-value config parsing") {
  const KeyValueConfig kv = KeyValueConfig::parse(
      "# comment\n"
      "name = \"a # b\"\n"
      "count = 12  # trailing\n"
      "ratio = 0.25\n"
      "flag = true\n"
      "list = [1, 2, 3]\n"
      "[extra]\n"
      "key = word\n");
  CHECK(kv.get_string("name", "") == "a # b");
  CHECK(kv.get_uint("count", 0) == 12);
  CHECK(kv.get_double("ratio", 0.0) == 0.25);
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_list("list", {}) == std::vector<std::string>{"1", "2", "3"});
  CHECK(kv.get_string("extra.key", "") == "word");
  CHECK(kv.get_int("missing", -3) == -3);
  CHECK_THROWS_AS(KeyValueConfig::parse("no equals sign\n"), std::invalid_argument);
  CHECK_THROWS_AS(kv.get_uint("ratio", 0), std::invalid_argument);
}

TEST_CASE("experiment config parsing") {
  const ExperimentConfig cfg = parse_experiment_config(
      "dataset_dir = data\n"
      "scales = [2, 4]\n"
      "variants = [baseline, rgr_sag]\n"
      "rgr_sweep = [every_10, last_k]\n"
      "detector_ablation = true\n"
      "steps = 60\n"
      "rgr_k = 30\n"
      "detector = stat_divergence\n"
      "codec = pool2x\n"
      "workers = 3\n");
  CHECK(cfg.dataset_dir == "data");
  CHECK(cfg.scales == std::vector<std::size_t>{2, 4});
  CHECK(cfg.steps == 60);
  CHECK(cfg.codec == CodecKind::pool2x);
  CHECK(cfg.detector == DetectorKind::stat_divergence);
  CHECK(cfg.workers == 3);
  std::vector<std::string> ids;
  for (const auto& v : expand_variants(cfg)) ids.push_back(v.id);
  CHECK(ids == std::vector<std::string>{"baseline", "rgr_sag", "rgr_every_10", "rgr_last_k", "detector_on",
                                        "detector_off"});

  CHECK_THROWS_AS(parse_experiment_config("colour = blue\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("scales = [5]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("step_sweep = [5, 50]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("codec = jpeg\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("variants = [rgr_sometimes]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("detector = none\nvariants = [rgr_sag]\n"), std::invalid_argument);
  CHECK_NOTHROW(parse_experiment_config("detector = none\nvariants = [baseline, rgr_only]\n"));
}

TEST_CASE("variant presets") {
  CHECK(variant_preset("baseline").rgr_policy == StepPolicy::off);
  CHECK(variant_preset("rgr_only").sag_policy == StepPolicy::off);
  CHECK(variant_preset("rgr_sag").sag_policy == StepPolicy::every_step);
  CHECK(variant_preset("rgr_last_k").rgr_policy == StepPolicy::last_k);
  CHECK(variant_preset("sag_after_k").sag_policy == StepPolicy::after_k);
  const VariantSpec off = variant_preset("detector_off");
  CHECK(off.blend_mode == BlendMode::direct_sum);
  CHECK_FALSE(off.uses_detector);
  CHECK_THROWS_AS(variant_preset("rgr_after_k"), std::invalid_argument);
}

TEST_CASE("seed derivation") {
  CHECK(derive_image_seed(7, 0) == splitmix64(7 ^ splitmix64(1)));
  CHECK(derive_image_seed(7, 3) == splitmix64(7 ^ splitmix64(4)));
  CHECK(derive_image_seed(7, 0) != derive_image_seed(7, 1));
  CHECK(derive_image_seed(7, 0) != derive_image_seed(8, 0));
}

TEST_CASE("make_lr") {
  const ImageRGB flat(16, 16, 0.42);
  const ImageRGB lr = make_lr(flat, 4);
  CHECK(lr.height() == 4);
  CHECK(lr.width() == 4);
  for (double v : lr.pixels()) CHECK(std::abs(v - 0.42) < 1e-12);

  const ImageRGB odd = make_lr(ImageRGB(10, 11, 0.3), 3);
  CHECK(odd.height() == 3);
  CHECK(odd.width() == 3);

  ImageRGB checker(32, 32);
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 32; ++x) {
      const double v = (x + y) % 2 ? 1.0 : 0.0;
      checker.set(y, x, {v, v, v});
    }
  const ImageRGB small = make_lr(checker, 2);
  REQUIRE(small.height() == 16);
  // Away from the mirrored border the eight taps over alternating pixels sum
  // to exactly half the kernel mass.
  for (std::size_t y = 2; y < 14; ++y)
    for (std::size_t x = 2; x < 14; ++x) CHECK(std::abs(small.at(y, x, 0) - 0.5) < 1e-9);
  for (double v : small.pixels()) CHECK(std::abs(v - 0.5) < 0.05);
  CHECK_THROWS_AS(make_lr(ImageRGB(2, 2, 0.0), 3), std::invalid_argument);
}

TEST_CASE("artifact placement is seeded and in bounds") {
  ExperimentConfig cfg;
  cfg.artifact_count = 3;
  const ArtifactSpec a = make_artifact(cfg, 11, 40, 48, 100);
  const ArtifactSpec b = make_artifact(cfg, 11, 40, 48, 100);
  REQUIRE(a.region.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.region[i].top == b.region[i].top);
    CHECK(a.region[i].left == b.region[i].left);
    CHECK(a.region[i].height == 10);
    CHECK(a.region[i].width == 12);
    CHECK(a.region[i].top + a.region[i].height <= 40);
    CHECK(a.region[i].left + a.region[i].width <= 48);
  }
  CHECK(a.active.hi == 100);
  CHECK_NOTHROW(validate_artifact(a, 40, 48));
}

TEST_CASE("one image, one scale, three variants") {
  const fs::path out = scratch("three");
  const ExperimentConfig cfg = small_config(out);
  const auto images = small_dataset(1);
  const ExperimentResult r = run_experiment(cfg, images);
  REQUIRE(r.records.size() == 3);
  for (const auto& rec : r.records) {
    CHECK(rec.seed == derive_image_seed(0, 0));
    CHECK(std::isfinite(rec.psnr_y));
    CHECK(fs::exists(rec.trace_path));
  }
  CHECK(fs::exists(out / "results.csv"));
  CHECK(fs::exists(out / "summary.md"));
  CHECK(fs::exists(out / "overlays" / "img_000_x2_rgr_sag.png"));
  const std::string csv = slurp(out / "results.csv");
  CHECK(csv.starts_with("image,scale,variant,psnr_y,ssim_y,wall_ms,seed\nimg_000,2,baseline,"));
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 4);
}

TEST_CASE("results are byte-identical across reruns and worker counts") {
  const auto images = small_dataset(3);
  std::string first;
  for (std::size_t workers : {1u, 1u, 4u}) {
    const fs::path out = scratch("determinism_" + std::to_string(workers));
    ExperimentConfig cfg = small_config(out);
    cfg.workers = workers;
    cfg.write_overlays = false;
    cfg.detector = DetectorKind::stat_divergence;
    cfg.variants = {"baseline", "rgr_only", "rgr_sag"};
    run_experiment(cfg, images);
    const std::string csv = slurp(out / "results.csv");
    if (first.empty()) first = csv;
    CHECK(csv == first);
  }
}

TEST_CASE("baseline ignores the detector choice") {
  const auto images = small_dataset(2);
  std::vector<double> psnr;
  for (DetectorKind kind : {DetectorKind::oracle, DetectorKind::stat_divergence, DetectorKind::none}) {
    ExperimentConfig cfg = small_config(scratch("baseline_detector"));
    cfg.detector = kind;
    cfg.variants = {"baseline"};
    cfg.write_overlays = false;
    cfg.write_traces = false;
    const ExperimentResult r = run_experiment(cfg, images);
    psnr.push_back(r.records[0].psnr_y + r.records[1].psnr_y);
  }
  CHECK(psnr[0] == psnr[1]);
  CHECK(psnr[0] == psnr[2]);
}

TEST_CASE("summarize averages per variant and scale") {
  std::vector<RunRecord> recs(4);
  recs[0] = {"a", 0, 2, "baseline", 20.0, 0.5, 0, 1, ""};
  recs[1] = {"b", 1, 2, "baseline", 22.0, 0.7, 0, 2, ""};
  recs[2] = {"a", 0, 2, "rgr_only", 30.0, 0.9, 0, 1, ""};
  recs[3] = {"a", 0, 4, "baseline", 18.0, 0.4, 0, 1, ""};
  const auto rows = summarize(recs);
  REQUIRE(rows.size() == 3);
  bool found = false;
  for (const auto& row : rows) {
    if (row.variant == "baseline" && row.scale == 2) {
      found = true;
      CHECK(row.count == 2);
      CHECK(std::abs(row.mean_psnr_y - 21.0) < 1e-9);
      CHECK(std::abs(row.mean_ssim_y - 0.6) < 1e-9);
    }
  }
  CHECK(found);
  const std::string csv = format_results_csv({{"a", 0, 2, "baseline", INFINITY, 1.0, 0, 9, ""}});
  CHECK(csv == "image,scale,variant,psnr_y,ssim_y,wall_ms,seed\na,2,baseline,inf,1.000000,0.000,9\n");
}

TEST_CASE("step sweep") {
  const fs::path out = scratch("sweep");
  ExperimentConfig cfg = small_config(out);
  cfg.step_sweep = {30, 10, 20, 10};
  const auto points = run_step_sweep(cfg, small_dataset(2));
  REQUIRE(points.size() == 3);
  CHECK(points[0].steps == 10);
  CHECK(points[1].steps == 20);
  CHECK(points[2].steps == 30);
  for (const auto& p : points) {
    CHECK(std::isfinite(p.mean_psnr_y));
    CHECK(p.mean_psnr_y > 0.0);
  }
  CHECK(slurp(out / "step_sweep.csv").starts_with("T,mean_psnr_y\n10,"));
}

TEST_CASE("corpus generation is deterministic") {
  const fs::path a = scratch("corpus_a"), b = scratch("corpus_b");
  const auto fa = generate_corpus(a.string(), 4, 17);
  const auto fb = generate_corpus(b.string(), 4, 17);
  REQUIRE(fa.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(slurp(fa[i]) == slurp(fb[i]));
  const ImageRGB img = read_png(fa[1]);
  CHECK(img == synthetic_image(1, 17));
  CHECK(img.height() % 8 == 0);
  CHECK(img.height() >= 64);
  CHECK(img.width() <= 128);

  const auto loaded = load_dataset(a.string());
  REQUIRE(loaded.size() == 4);
  CHECK(loaded[0].id == "img_000");
  std::ofstream(a / "broken.png") << "not a png";
  CHECK(load_dataset(a.string()).size() == 4);
}
