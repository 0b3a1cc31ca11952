// Command-line front end: experiment runs, step-count sweeps and synthetic
// corpus generation.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "sargd/corpus.hpp"
#include "sargd/experiment.hpp"

namespace {

sargd::ExperimentConfig load(const std::string& path, std::optional<std::size_t> workers,
                             const std::string& output_dir) {
  sargd::ExperimentConfig cfg = sargd::load_experiment_config(path);
  if (workers) cfg.workers = *workers;
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  sargd::validate_experiment_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reality-guided diffusion sampling experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::optional<std::size_t> workers;

  auto* run = app.add_subcommand("run", "Run every image x scale x variant and write reports");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Worker threads (overrides config)");
  run->add_option("--output", output_dir, "Output directory (overrides config)");

  auto* sweep = app.add_subcommand("sweep-steps", "Mean PSNR-Y of rgr_sag for each step count");
  sweep->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--workers", workers, "Worker threads (overrides config)");
  sweep->add_option("--output", output_dir, "Output directory (overrides config)");

  std::string corpus_dir;
  std::size_t corpus_count = 20;
  std::uint64_t corpus_seed = 0;
  auto* gen = app.add_subcommand("gen-corpus", "Write a deterministic synthetic PNG corpus");
  gen->add_option("--out", corpus_dir, "Output directory")->required();
  gen->add_option("--n", corpus_count, "Number of images")->check(CLI::PositiveNumber);
  gen->add_option("--seed", corpus_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = load(config_path, workers, output_dir);
      const auto result = sargd::run_experiment(cfg);
      for (const auto& row : sargd::summarize(result.records)) {
        std::cout << row.variant << " x" << row.scale << ": PSNR-Y " << row.mean_psnr_y << " dB, SSIM-Y "
                  << row.mean_ssim_y << " (" << row.count << " images)\n";
      }
      std::cout << "wrote " << cfg.output_dir << "/results.csv\n";
    } else if (*sweep) {
      const auto cfg = load(config_path, workers, output_dir);
      for (const auto& p : sargd::run_step_sweep(cfg)) {
        std::cout << "T=" << p.steps << ": " << p.mean_psnr_y << " dB\n";
      }
      std::cout << "wrote " << cfg.output_dir << "/step_sweep.csv\n";
    } else if (*gen) {
      const auto paths = sargd::generate_corpus(corpus_dir, corpus_count, corpus_seed);
      std::cout << "wrote " << paths.size() << " images to " << corpus_dir << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
