// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lfr/rng.hpp"

namespace lfr {

namespace {

using i64 = std::int64_t;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::uint64_t key_stream(std::uint64_t seed, const EvalKey& key) {
  std::uint64_t h = hash_mix(seed, static_cast<std::uint64_t>(key.kind) + 1);
  h = hash_mix(h, static_cast<std::uint64_t>(key.n));
  h = hash_mix(h, static_cast<std::uint64_t>(key.k_c));
  h = hash_mix(h, key.a_bits);
  return h;
}

EvalKey make_key(int kind, const LfParam& p) {
  return EvalKey{kind, p.n, p.k_c, std::bit_cast<std::uint64_t>(p.a)};
}

}  // namespace

long CostLedger::m_iter() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<long>(cache_.size());
}

long CostLedger::n_iter() const {
  std::lock_guard<std::mutex> lock(mu_);
  return n_iter_;
}

void CostLedger::count_iteration(long delta) {
  std::lock_guard<std::mutex> lock(mu_);
  n_iter_ += delta;
}

std::optional<OverlapEstimate> CostLedger::lookup(const EvalKey& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = cache_.find(key);
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

void CostLedger::store(const EvalKey& key, const OverlapEstimate& estimate) {
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, estimate);
}

std::vector<double> qae_phase_distribution(double theta, int t) {
  if (t < 1 || t > 24) throw std::invalid_argument("phase register width out of range");
  const i64 T = i64{1} << t;
  const double Td = static_cast<double>(T);
  const double f = theta / std::numbers::pi;
  const auto kernel = [&](double x) {
    // |(1/T) sum_j e^{2 pi i j x / T}|^2, periodic in T
    x = std::remainder(x, Td);
    const double s = std::sin(std::numbers::pi * x / Td);
    if (std::abs(s) < 1e-300) return 1.0;
    const double top = std::sin(std::numbers::pi * x);
    return (top * top) / (Td * Td * s * s);
  };
  std::vector<double> probs(static_cast<std::size_t>(T));
  double total = 0.0;
  for (i64 k = 0; k < T; ++k) {
    const double p =
        0.5 * kernel(double(k) - Td * f) + 0.5 * kernel(double(k) + Td * f);
    probs[static_cast<std::size_t>(k)] = p;
    total += p;
  }
  for (double& p : probs) p /= total;
  return probs;
}

double qae_estimate_probability(double p0, int t, int repetitions,
                                std::uint64_t stream_seed) {
  p0 = clamp01(p0);
  const double theta = std::asin(std::sqrt(p0));
  const std::vector<double> dist = qae_phase_distribution(theta, t);
  const i64 T = i64{1} << t;
  Rng rng(stream_seed);
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    const std::size_t k = rng.sample_discrete(dist);
    const double s = std::sin(std::numbers::pi * double(k) / double(T));
    samples.push_back(s * s);
  }
  std::nth_element(samples.begin(), samples.begin() + samples.size() / 2,
                   samples.end());
  return samples[samples.size() / 2];
}

double exact_sq_overlap(const std::vector<double>& target_probs, int target_n,
                        const LfParam& param) {
  const i64 Nt = i64{1} << target_n;
  if (target_probs.size() != static_cast<std::size_t>(Nt)) {
    throw std::invalid_argument("target probability vector size mismatch");
  }
  if (param.n == target_n) {
    const std::vector<double> lsq = lf_sq_vector(param);
    double h = 0.0;
    for (i64 k = 0; k < Nt; ++k) h += target_probs[k] * lsq[k];
    return h;
  }
  if (param.n < target_n) {
    // average the target over its least significant qubits
    const int m = target_n - param.n;
    const i64 block = i64{1} << m;
    const std::vector<double> lsq = lf_sq_vector(param);
    double h = 0.0;
    for (i64 K = 0; K < (i64{1} << param.n); ++K) {
      double p = 0.0;
      for (i64 low = 0; low < block; ++low) p += target_probs[K * block + low];
      h += p * lsq[K];
    }
    return h;
  }
  // basis register is larger: average it over its least significant qubits
  const int m = param.n - target_n;
  const i64 block = i64{1} << m;
  const std::vector<double> lsq = lf_sq_vector(param);
  double h = 0.0;
  for (i64 k = 0; k < Nt; ++k) {
    double bar = 0.0;
    for (i64 low = 0; low < block; ++low) bar += lsq[k * block + low];
    h += target_probs[k] * bar;
  }
  return h;
}

OverlapEstimator::OverlapEstimator(StateVector target, MeasurementBudget budget,
                                   std::shared_ptr<CostLedger> ledger)
    : target_(std::move(target)),
      budget_(budget),
      ledger_(ledger ? std::move(ledger) : std::make_shared<CostLedger>()) {
  target_probs_.resize(static_cast<std::size_t>(target_.size()));
  for (i64 i = 0; i < target_.size(); ++i) {
    target_probs_[static_cast<std::size_t>(i)] = std::norm(target_.amps[i]);
  }
}

OverlapEstimate OverlapEstimator::with_cache(
    const EvalKey& key,
    const std::function<OverlapEstimate(std::uint64_t)>& eval) {
  if (auto hit = ledger_->lookup(key)) return *hit;
  const OverlapEstimate est = eval(key_stream(budget_.seed, key));
  ledger_->store(key, est);
  return est;
}

OverlapEstimate OverlapEstimator::complex_overlap(const LfParam& param) {
  if (param.n != target_.n) {
    throw std::invalid_argument(
        "complex overlap requires matching qubit counts");
  }
  return with_cache(make_key(0, param), [&](std::uint64_t stream) {
    const std::vector<double> lf = lf_state_vector(param);
    cdouble exact = 0.0;
    for (i64 k = 0; k < target_.size(); ++k) {
      exact += std::conj(target_.amps[k]) * lf[static_cast<std::size_t>(k)];
    }
    switch (budget_.mode) {
      case EstimationMode::Exact:
        return OverlapEstimate{exact, 0, budget_.mode};
      case EstimationMode::Shots: {
        const long per_setting =
            budget_.shots_per_setting ? budget_.shots : budget_.shots / 2;
        const long second = budget_.shots_per_setting
                                ? budget_.shots
                                : budget_.shots - per_setting;
        Rng rng(stream);
        // phi = 0 reads Re, phi = pi/2 reads -Im
        const double p_re = clamp01((1.0 + std::real(exact)) / 2.0);
        const double p_im = clamp01((1.0 - std::imag(exact)) / 2.0);
        const double re_hat =
            per_setting > 0
                ? 2.0 * double(rng.binomial(per_setting, p_re)) / double(per_setting) - 1.0
                : 0.0;
        const double im_hat =
            second > 0
                ? 1.0 - 2.0 * double(rng.binomial(second, p_im)) / double(second)
                : 0.0;
        cdouble value(std::clamp(re_hat, -1.0, 1.0), std::clamp(im_hat, -1.0, 1.0));
        if (std::abs(value) > 1.0) value /= std::abs(value);
        return OverlapEstimate{value, per_setting + second, budget_.mode};
      }
      case EstimationMode::AaEnhanced: {
        const double p_re = clamp01((1.0 + std::real(exact)) / 2.0);
        const double p_im = clamp01((1.0 - std::imag(exact)) / 2.0);
        const double re_hat = 2.0 * qae_estimate_probability(
                                        p_re, budget_.aa_bits,
                                        budget_.aa_repetitions, stream) -
                              1.0;
        const double im_hat = 1.0 - 2.0 * qae_estimate_probability(
                                              p_im, budget_.aa_bits,
                                              budget_.aa_repetitions,
                                              hash_mix(stream, 2));
        cdouble value(std::clamp(re_hat, -1.0, 1.0), std::clamp(im_hat, -1.0, 1.0));
        if (std::abs(value) > 1.0) value /= std::abs(value);
        return OverlapEstimate{value, 2L * budget_.aa_repetitions, budget_.mode};
      }
    }
    throw std::logic_error("unreachable");
  });
}

OverlapEstimate OverlapEstimator::sq_overlap(const LfParam& param) {
  return with_cache(make_key(1, param), [&](std::uint64_t stream) {
    const double h = exact_sq_overlap(target_probs_, target_.n, param);
    switch (budget_.mode) {
      case EstimationMode::Exact:
        return OverlapEstimate{cdouble(h), 0, budget_.mode};
      case EstimationMode::Shots: {
        Rng rng(stream);
        const double p0 = clamp01((1.0 + h) / 2.0);
        const double p_hat =
            double(rng.binomial(budget_.shots, p0)) / double(budget_.shots);
        return OverlapEstimate{cdouble(clamp01(2.0 * p_hat - 1.0)),
                               budget_.shots, budget_.mode};
      }
      case EstimationMode::AaEnhanced: {
        const double p_hat = qae_estimate_probability(
            (1.0 + h) / 2.0, budget_.aa_bits, budget_.aa_repetitions, stream);
        return OverlapEstimate{cdouble(clamp01(2.0 * p_hat - 1.0)),
                               budget_.aa_repetitions, budget_.mode};
      }
    }
    throw std::logic_error("unreachable");
  });
}

OverlapEstimate OverlapEstimator::target_self_norm() {
  const EvalKey key{2, target_.n, 0, 0};
  return with_cache(key, [&](std::uint64_t stream) {
    double purity = 0.0;
    for (double p : target_probs_) purity += p * p;
    switch (budget_.mode) {
      case EstimationMode::Exact:
        return OverlapEstimate{cdouble(purity), 0, budget_.mode};
      case EstimationMode::Shots: {
        Rng rng(stream);
        const double p0 = clamp01((1.0 + purity) / 2.0);
        const double p_hat =
            double(rng.binomial(budget_.shots, p0)) / double(budget_.shots);
        return OverlapEstimate{cdouble(clamp01(2.0 * p_hat - 1.0)),
                               budget_.shots, budget_.mode};
      }
      case EstimationMode::AaEnhanced: {
        const double p_hat = qae_estimate_probability(
            (1.0 + purity) / 2.0, budget_.aa_bits, budget_.aa_repetitions,
            stream);
        return OverlapEstimate{cdouble(clamp01(2.0 * p_hat - 1.0)),
                               budget_.aa_repetitions, budget_.mode};
      }
    }
    throw std::logic_error("unreachable");
  });
}

OverlapEstimate aa_enhanced_estimate(const StateVector& target,
                                     const LfParam& lf, int aa_bits,
                                     int repetitions, std::uint64_t seed) {
  std::vector<double> probs(static_cast<std::size_t>(target.size()));
  for (i64 i = 0; i < target.size(); ++i) {
    probs[static_cast<std::size_t>(i)] = std::norm(target.amps[i]);
  }
  const double h = exact_sq_overlap(probs, target.n, lf);
  const EvalKey key = make_key(1, lf);
  const double est = qae_estimate_probability((1.0 + h) / 2.0, aa_bits,
                                              repetitions, key_stream(seed, key));
  return OverlapEstimate{cdouble(est), repetitions, EstimationMode::AaEnhanced};
}

}  // namespace lfr
