// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "lfr/estimator.hpp"
#include "lfr/fit.hpp"
#include "lfr/statevector.hpp"

namespace lfr {

/// Spectral sampling problem: a diagonalizable test Hamiltonian given by its
/// eigenvalues and spectral weights, a time-scaling parameter t0, the width
/// `a` of the one-sided Slater profile loaded on the phase register, and the
/// register sizes. The broadening in grid units is eta = a N / (2 pi).
struct SpectralProblem {
  std::vector<double> eigenvalues;  // E_j, length 2^{n_s} at most
  std::vector<double> weights;      // |c_j|^2, nonnegative, sum 1
  double t0 = 1.0;
  int n = 6;     // phase register width; histogram has N = 2^n bins
  int n_s = 2;   // system register width
  double a = 0.1;

  std::int64_t bins() const { return std::int64_t{1} << n; }
  void validate() const;

  static double a_from_eta(double eta, int n);
  double eta() const;
};

struct QpeHistogram {
  std::vector<double> probabilities;
  bool sampled = false;
  long shots = 0;
};

/// Closed-form phase-register kernel
///   alpha(x) = C~_S(n,a)/sqrt(N) * (1 - e^{2 pi i x - aN}) / (1 - e^{2 pi i x/N - a}),
/// the geometric-series value of the one-sided Slater transform. Periodic in
/// x with period N; sum_k |alpha(x - k)|^2 = 1 for any real x.
cdouble alpha_lf(double x, int n, double a);

/// Exact readout distribution P_k = sum_j w_j |alpha(t0 E_j - k)|^2.
QpeHistogram qpe_exact_histogram(const SpectralProblem& problem);

/// Same distribution obtained by full statevector simulation of the sampling
/// circuit (Slater-profile phase register, controlled powers of the diagonal
/// propagator, inverse QFT).
QpeHistogram qpe_circuit_histogram(const SpectralProblem& problem);

/// Full joint output state of the sampling circuit; the system register
/// occupies qubits [0, n_s), the phase register [n_s, n_s + n).
StateVector qpe_output_state(const SpectralProblem& problem);

/// Ancilla-0 probability of the swap test between a basis-state register and
/// the phase register of the sampling circuit, simulated end to end. With
/// omit_qft_pair the trailing inverse QFTs of both register preparations are
/// dropped; the probability is unchanged because the swap test only compares
/// the two registers.
double qpe_swap_test_probability(const SpectralProblem& problem,
                                 const LfParam& lf, bool omit_qft_pair = false);

/// Squared overlap h between a Lorentzian basis state and the phase-register
/// marginal, under a measurement budget. Register sizes may differ (the
/// larger one is averaged over its least significant qubits).
OverlapEstimate qpe_swap_overlap(const SpectralProblem& problem,
                                 const LfParam& lf,
                                 const MeasurementBudget& budget);

/// Lorentzian reference profile of the readout distribution,
/// P_k ∝ sum_j w_j eta / (wrap(t0 E_j - k)^2 + eta^2), normalized to sum 1.
/// Distances wrap mod N to the representative in (-N/2, N/2].
std::vector<double> lorentzian_reference(const SpectralProblem& problem);

struct SpectrumFitConfig {
  LclfModel init;
  AnnealingSchedule schedule;
  MeasurementBudget budget;
  bool optimize_a = false;  // widths are usually pinned to the known eta
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
};

/// Reconstructs the readout distribution as a combination of squared
/// Lorentzian vectors; the squared-overlap oracle is the swap test against
/// the phase register.
FitTrace fit_spectrum(const SpectralProblem& problem,
                      const SpectrumFitConfig& config);

/// Parses a spectral problem file: `key = value` lines for n, ns, t0 and
/// a (or eta), plus one `E weight` pair per line. '#' starts a comment.
SpectralProblem parse_spectrum_file(const std::string& path);

}  // namespace lfr
