// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfr/fit.hpp"
#include "lfr/qpe.hpp"

namespace lfr {

/// Thrown on filesystem failures while reading inputs or writing results.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentKind { StateReadout, AmplitudeReadout, QpeSpectrum, ScalingBench };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// One experiment campaign: a target, a model initialization (possibly several
/// center initializations, swept as groups), a measurement budget, an
/// annealing schedule, and a trial count. Everything is serializable; the
/// canonical serialization is hashed into every output file.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::StateReadout;
  int n = 5;
  std::string target = "psi_ideal";  // "psi_ideal" | "file:<path>" | "spectrum:<path>"
  std::vector<double> a_init;
  std::vector<std::vector<std::int64_t>> kc_inits;
  std::vector<double> kc_fracs;      // scaling-bench: centers as fractions of N
  MeasurementBudget budget;
  AnnealingSchedule schedule;
  bool optimize_a = false;
  double fd_step = 1e-4;
  int trials = 10;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int n_min = 4;  // scaling-bench sweep range
  int n_max = 8;
  std::string base_dir;  // directory of the config file, for relative paths

  int n_loc() const { return static_cast<int>(a_init.size()); }
};

ExperimentConfig parse_config_file(const std::string& path);

/// Throws config_error when the config is internally inconsistent.
void validate_config(const ExperimentConfig& config);

/// Canonical key = value serialization (fixed key order).
std::string resolved_config_text(const ExperimentConfig& config);

/// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Benchmark target: two Gaussians of width ratio 2:1 centered at grid
/// fractions 0.5 and 0.25, sampled on x_j = j/N and L2-normalized.
StateVector psi_ideal_target(int n);

/// Amplitude file: one "re im" pair per line, 2^n lines. Normalizes on load
/// and warns on stderr when the input norm is off by more than 1e-6.
StateVector load_amplitude_file(const std::string& path, int n);

/// Plain L1 distance between two center vectors.
std::int64_t l1_distance(const std::vector<std::int64_t>& a,
                         const std::vector<std::int64_t>& b);

/// Runs the campaign and writes results.csv, summary.json, per-trial trace
/// files, the resolved config, and timings.csv into config.out_dir. All
/// outputs except timings.csv are a pure function of (config, seed).
void run_experiment(const ExperimentConfig& config);

/// Rewrites a completed run into whitespace-delimited plot-ready columns
/// (convergence curves, evaluation counts vs center displacement, infidelity
/// vs qubit count).
void emit_plotdata(const std::string& result_dir);

}  // namespace lfr
