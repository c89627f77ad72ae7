// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/qpe.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "lfr/simulator.hpp"

namespace lfr {

namespace {

using i64 = std::int64_t;

std::vector<int> make_range(int offset, int count) {
  std::vector<int> reg(count);
  for (int i = 0; i < count; ++i) reg[i] = offset + i;
  return reg;
}

double wrap_distance(double x, double N) {
  // representative of x mod N in (-N/2, N/2]
  double r = std::fmod(x, N);
  if (r <= -N / 2.0) r += N;
  if (r > N / 2.0) r -= N;
  return r;
}

// One-sided Slater profile on the phase register: a plain RY ladder.
Circuit slater_in_prep_ops(int n, double a, int offset) {
  Circuit ops;
  for (int m = 0; m < n; ++m) {
    ops.push_back(
        CircuitOp::ry(offset + m, 2.0 * std::atan(std::exp(-std::ldexp(a, m)))));
  }
  return ops;
}

// System prep + controlled powers of the diagonal propagator. The trailing
// inverse QFT is split out so the swap-test cancellation can drop it.
Circuit qpe_core_ops(const SpectralProblem& problem) {
  const int n_s = problem.n_s;
  const int n = problem.n;
  const i64 Ns = i64{1} << n_s;
  const double Nd = static_cast<double>(problem.bins());

  std::vector<cdouble> sys(static_cast<std::size_t>(Ns), cdouble(0.0));
  for (std::size_t j = 0; j < problem.weights.size(); ++j) {
    sys[j] = std::sqrt(problem.weights[j]);
  }
  Circuit ops;
  ops.push_back(CircuitOp::state_prep(make_range(0, n_s), std::move(sys)));
  Circuit slater = slater_in_prep_ops(n, problem.a, n_s);
  ops.insert(ops.end(), slater.begin(), slater.end());

  for (int m = 0; m < n; ++m) {
    std::vector<double> phases(static_cast<std::size_t>(Ns), 0.0);
    for (std::size_t j = 0; j < problem.eigenvalues.size(); ++j) {
      phases[j] = 2.0 * std::numbers::pi * problem.t0 * problem.eigenvalues[j] *
                  std::ldexp(1.0, m) / Nd;
    }
    ops.push_back(CircuitOp::diagonal_phase(make_range(0, n_s), std::move(phases))
                      .with_control(n_s + m, true));
  }
  return ops;
}

std::vector<double> phase_register_probs(const SpectralProblem& problem) {
  std::vector<double> p(static_cast<std::size_t>(problem.bins()), 0.0);
  for (std::size_t j = 0; j < problem.eigenvalues.size(); ++j) {
    if (problem.weights[j] == 0.0) continue;
    for (i64 k = 0; k < problem.bins(); ++k) {
      const double x = problem.t0 * problem.eigenvalues[j] - double(k);
      p[static_cast<std::size_t>(k)] +=
          problem.weights[j] * std::norm(alpha_lf(x, problem.n, problem.a));
    }
  }
  return p;
}

}  // namespace

void SpectralProblem::validate() const {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("bad phase register width");
  if (n_s < 1 || n_s > kMaxQubits) throw std::invalid_argument("bad system register width");
  if (!(a >= kMinDecayRate)) throw std::invalid_argument("decay rate too small");
  if (eigenvalues.size() != weights.size() || eigenvalues.empty()) {
    throw std::invalid_argument("eigenvalues/weights mismatch");
  }
  if (eigenvalues.size() > static_cast<std::size_t>(i64{1} << n_s)) {
    throw std::invalid_argument("more levels than system basis states");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative spectral weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("spectral weights must sum to 1");
  }
}

double SpectralProblem::a_from_eta(double eta, int n) {
  return 2.0 * std::numbers::pi * eta / std::ldexp(1.0, n);
}

double SpectralProblem::eta() const {
  return a * std::ldexp(1.0, n) / (2.0 * std::numbers::pi);
}

cdouble alpha_lf(double x, int n, double a) {
  if (!(a >= kMinDecayRate)) throw std::invalid_argument("decay rate too small");
  const double Nd = std::ldexp(1.0, n);
  const double xr = wrap_distance(x, Nd);  // alpha is N-periodic
  const double theta = 2.0 * std::numbers::pi * xr;
  const cdouble num = 1.0 - std::polar(std::exp(-a * Nd), theta);
  const cdouble den = 1.0 - std::polar(std::exp(-a), theta / Nd);
  return slater_norm_const_one_sided(n, a) / std::sqrt(Nd) * num / den;
}

QpeHistogram qpe_exact_histogram(const SpectralProblem& problem) {
  problem.validate();
  QpeHistogram hist;
  hist.probabilities = phase_register_probs(problem);
  double total = 0.0;
  for (double p : hist.probabilities) total += p;
  for (double& p : hist.probabilities) p /= total;
  return hist;
}

StateVector qpe_output_state(const SpectralProblem& problem) {
  problem.validate();
  const int total = problem.n_s + problem.n;
  if (total > kMaxQubits) {
    throw capacity_error("sampling circuit needs " + std::to_string(total) +
                         " qubits");
  }
  Circuit ops = qpe_core_ops(problem);
  ops.push_back(CircuitOp::inverse_qft(make_range(problem.n_s, problem.n)));
  return apply_circuit(StateVector::zero_state(total), ops);
}

QpeHistogram qpe_circuit_histogram(const SpectralProblem& problem) {
  const StateVector out = qpe_output_state(problem);
  const std::vector<int> reg = make_range(problem.n_s, problem.n);
  QpeHistogram hist;
  hist.probabilities = register_probabilities(out, reg);
  return hist;
}

double qpe_swap_test_probability(const SpectralProblem& problem,
                                 const LfParam& lf, bool omit_qft_pair) {
  problem.validate();
  if (lf.n != problem.n) {
    throw std::invalid_argument(
        "swap-test circuit needs matching register widths");
  }
  const int n_s = problem.n_s;
  const int n = problem.n;
  const int lf_base = n_s + n;
  const int anc = n_s + 2 * n;
  if (anc + 1 > kMaxQubits) {
    throw capacity_error("swap-test circuit needs " + std::to_string(anc + 1) +
                         " qubits");
  }

  Circuit ops = qpe_core_ops(problem);
  Circuit lf_ops = shifted_lf_prep_ops(lf, lf_base);
  if (omit_qft_pair) {
    lf_ops.pop_back();  // both trailing inverse QFTs cancel in the swap test
  } else {
    ops.push_back(CircuitOp::inverse_qft(make_range(n_s, n)));
  }
  ops.insert(ops.end(), lf_ops.begin(), lf_ops.end());

  ops.push_back(CircuitOp::h(anc));
  for (int i = 0; i < n; ++i) {
    ops.push_back(CircuitOp::swap(lf_base + i, n_s + i).with_control(anc, true));
  }
  ops.push_back(CircuitOp::h(anc));

  const StateVector out = apply_circuit(StateVector::zero_state(anc + 1), ops);
  return bit_probability(out, anc, false);
}

OverlapEstimate qpe_swap_overlap(const SpectralProblem& problem,
                                 const LfParam& lf,
                                 const MeasurementBudget& budget) {
  const QpeHistogram hist = qpe_exact_histogram(problem);
  std::vector<cdouble> amps(hist.probabilities.size());
  for (std::size_t k = 0; k < amps.size(); ++k) {
    amps[k] = std::sqrt(hist.probabilities[k]);
  }
  OverlapEstimator est(StateVector::from_amplitudes(problem.n, std::move(amps)),
                       budget);
  return est.sq_overlap(lf);
}

std::vector<double> lorentzian_reference(const SpectralProblem& problem) {
  problem.validate();
  const double Nd = static_cast<double>(problem.bins());
  const double eta = problem.eta();
  std::vector<double> ref(static_cast<std::size_t>(problem.bins()), 0.0);
  double total = 0.0;
  for (i64 k = 0; k < problem.bins(); ++k) {
    double v = 0.0;
    for (std::size_t j = 0; j < problem.eigenvalues.size(); ++j) {
      const double x =
          wrap_distance(problem.t0 * problem.eigenvalues[j] - double(k), Nd);
      v += problem.weights[j] * eta / (x * x + eta * eta);
    }
    ref[static_cast<std::size_t>(k)] = v;
    total += v;
  }
  for (double& v : ref) v /= total;
  return ref;
}

FitTrace fit_spectrum(const SpectralProblem& problem,
                      const SpectrumFitConfig& config) {
  const QpeHistogram hist = qpe_exact_histogram(problem);
  std::vector<cdouble> amps(hist.probabilities.size());
  for (std::size_t k = 0; k < amps.size(); ++k) {
    amps[k] = std::sqrt(hist.probabilities[k]);
  }
  AmplitudeFitProblem fit;
  fit.target = StateVector::from_amplitudes(problem.n, std::move(amps));
  fit.budget = config.budget;
  fit.init = config.init;
  fit.schedule = config.schedule;
  fit.optimize_a = config.optimize_a;
  fit.fd_step = config.fd_step;
  fit.seed = config.seed;
  return fit_amplitude(fit);
}

SpectralProblem parse_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open spectrum file: " + path);
  SpectralProblem problem;
  problem.eigenvalues.clear();
  problem.weights.clear();
  bool have_a = false;
  double eta = -1.0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string trimmed;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) {
        trimmed.push_back(c);
      }
    }
    while (!trimmed.empty() &&
           std::isspace(static_cast<unsigned char>(trimmed.back()))) {
      trimmed.pop_back();
    }
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq != std::string::npos) {
      std::istringstream key_in(trimmed.substr(0, eq));
      std::istringstream val_in(trimmed.substr(eq + 1));
      std::string key;
      key_in >> key;
      if (key == "n") {
        val_in >> problem.n;
      } else if (key == "ns" || key == "n_s") {
        val_in >> problem.n_s;
      } else if (key == "t0") {
        val_in >> problem.t0;
      } else if (key == "a") {
        val_in >> problem.a;
        have_a = true;
      } else if (key == "eta") {
        val_in >> eta;
      } else {
        throw config_error("unknown spectrum key '" + key + "' at line " +
                           std::to_string(lineno));
      }
      if (val_in.fail()) {
        throw config_error("bad value at line " + std::to_string(lineno));
      }
      continue;
    }
    std::istringstream pair_in(trimmed);
    double e = 0.0, w = 0.0;
    if (!(pair_in >> e >> w)) {
      throw config_error("expected 'E weight' at line " + std::to_string(lineno));
    }
    problem.eigenvalues.push_back(e);
    problem.weights.push_back(w);
  }
  if (!have_a) {
    if (eta <= 0.0) throw config_error("spectrum file needs 'a' or 'eta'");
    problem.a = SpectralProblem::a_from_eta(eta, problem.n);
  }
  problem.validate();
  return problem;
}

}  // namespace lfr
