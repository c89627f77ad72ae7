// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lfr/experiment.hpp"

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitIo = 4;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> mode;
  std::optional<long> shots;
  std::optional<std::string> out;
};

lfr::ExperimentConfig load(const std::string& path, const Overrides& ov) {
  lfr::ExperimentConfig config = lfr::parse_config_file(path);
  if (ov.seed) config.seed = *ov.seed;
  if (ov.trials) config.trials = *ov.trials;
  if (ov.mode) {
    if (*ov.mode == "exact") {
      config.budget.mode = lfr::EstimationMode::Exact;
    } else if (*ov.mode == "shots") {
      config.budget.mode = lfr::EstimationMode::Shots;
    } else if (*ov.mode == "aa") {
      config.budget.mode = lfr::EstimationMode::AaEnhanced;
    } else {
      throw lfr::config_error("unknown mode '" + *ov.mode + "'");
    }
  }
  if (ov.shots) config.budget.shots = *ov.shots;
  if (ov.out) config.out_dir = *ov.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlap-based quantum state readout toolkit"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  std::string result_dir;

  CLI::App* run = app.add_subcommand("run", "Run an experiment campaign");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--seed", ov.seed, "Master seed override");
  run->add_option("--trials", ov.trials, "Trial count override");
  run->add_option("--mode", ov.mode, "Measurement mode override (exact|shots|aa)");
  run->add_option("--shots", ov.shots, "Shot count override");
  run->add_option("--out", ov.out, "Output directory override");

  CLI::App* validate = app.add_subcommand("validate", "Parse and check a config");
  validate->add_option("config", config_path, "Experiment config file")->required();

  CLI::App* emit = app.add_subcommand("emit-plotdata",
                                      "Write plot-ready columns for a finished run");
  emit->add_option("dir", result_dir, "Result directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const lfr::ExperimentConfig config = load(config_path, ov);
      lfr::validate_config(config);
      lfr::run_experiment(config);
      std::cerr << "results written to " << config.out_dir << "\n";
    } else if (validate->parsed()) {
      const lfr::ExperimentConfig config = load(config_path, ov);
      lfr::validate_config(config);
      std::cout << lfr::resolved_config_text(config);
      std::cerr << "config ok, hash " << lfr::config_hash(config) << "\n";
    } else if (emit->parsed()) {
      lfr::emit_plotdata(result_dir);
      std::cerr << "plot data written to " << result_dir << "\n";
    }
  } catch (const lfr::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const lfr::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const lfr::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
