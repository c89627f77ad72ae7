// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "lfr/basis.hpp"
#include "lfr/statevector.hpp"

namespace lfr {

enum class EstimationMode { Exact, Shots, AaEnhanced };

struct MeasurementBudget {
  EstimationMode mode = EstimationMode::Exact;
  long shots = 1000;              // per evaluation (Shots mode)
  bool shots_per_setting = false; // interference test: `shots` per phase
                                  // setting instead of split across the two
  int aa_bits = 6;                // phase-register width t (AaEnhanced)
  int aa_repetitions = 5;         // odd sample count fed to the median
  std::uint64_t seed = 1;
};

struct OverlapEstimate {
  cdouble value;
  long shots_used = 0;
  EstimationMode mode = EstimationMode::Exact;
};

/// Cache key of one quantum evaluation. Distinct decay rates, centers, grids
/// or evaluation kinds are distinct quantum circuits and count separately.
struct EvalKey {
  int kind;  // 0 complex overlap, 1 squared overlap, 2 self norm
  int n;
  std::int64_t k_c;
  std::uint64_t a_bits;

  friend auto operator<=>(const EvalKey&, const EvalKey&) = default;
};

/// Books every quantum evaluation. Re-queried keys hit the cache, so m_iter
/// counts unique parameter sets only. Updates are serialized; results do not
/// depend on evaluation order because per-key RNG streams are derived from
/// the key itself.
class CostLedger {
 public:
  long m_iter() const;
  long n_iter() const;
  void count_iteration(long delta = 1);

  std::optional<OverlapEstimate> lookup(const EvalKey& key) const;
  void store(const EvalKey& key, const OverlapEstimate& estimate);

 private:
  mutable std::mutex mu_;
  std::map<EvalKey, OverlapEstimate> cache_;
  long n_iter_ = 0;
};

/// Exact distribution of the t-bit phase-estimation readout on an
/// amplification operator with rotation angle theta (two eigenphase branches
/// at +-theta/pi, equal weight).
std::vector<double> qae_phase_distribution(double theta, int t);

/// Phase-estimation-based estimate of a probability p0 = sin^2(theta):
/// samples the exact t-bit readout distribution `repetitions` times and
/// returns the median of sin^2(pi k / 2^t).
double qae_estimate_probability(double p0, int t, int repetitions,
                                std::uint64_t stream_seed);

/// Overlap estimates between one fixed target state and Lorentzian basis
/// states under a measurement budget. Exact mode returns circuit-exact
/// values; Shots mode draws Bernoulli counts from the exact ancilla
/// probabilities; AaEnhanced mode samples the phase-estimation readout.
class OverlapEstimator {
 public:
  OverlapEstimator(StateVector target, MeasurementBudget budget,
                   std::shared_ptr<CostLedger> ledger = nullptr);

  /// <target|L; a, k_c>, via the two-phase-setting interference test in
  /// Shots mode. Requires matching qubit counts.
  OverlapEstimate complex_overlap(const LfParam& param);

  /// sum_k |c_k|^2 L^2_{k - k_c}. Register sizes may differ; the larger
  /// register is averaged over its least significant qubits.
  OverlapEstimate sq_overlap(const LfParam& param);

  /// sum_k |c_k|^4 (the swap test fed the target on both inputs).
  OverlapEstimate target_self_norm();

  const StateVector& target() const { return target_; }
  const MeasurementBudget& budget() const { return budget_; }
  CostLedger& ledger() { return *ledger_; }
  const std::shared_ptr<CostLedger>& ledger_ptr() const { return ledger_; }

 private:
  OverlapEstimate with_cache(const EvalKey& key,
                             const std::function<OverlapEstimate(std::uint64_t)>& eval);

  StateVector target_;
  std::vector<double> target_probs_;
  MeasurementBudget budget_;
  std::shared_ptr<CostLedger> ledger_;
};

/// Spec'd standalone entry point: phase-estimation-enhanced estimate of the
/// swap-test ancilla-0 probability P_0 = (1 + h) / 2 for (target, lf).
OverlapEstimate aa_enhanced_estimate(const StateVector& target,
                                     const LfParam& lf, int aa_bits,
                                     int repetitions = 5,
                                     std::uint64_t seed = 1);

/// Exact squared overlap h for arbitrary target probabilities, including the
/// least-significant-qubit averaging when register sizes differ.
double exact_sq_overlap(const std::vector<double>& target_probs, int target_n,
                        const LfParam& param);

}  // namespace lfr
