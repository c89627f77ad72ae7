// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lfr/common.hpp"

namespace lfr {

/// One discrete Lorentzian basis function on the 2^n grid: decay rate `a` of
/// the underlying Slater profile and integer peak center `k_c` (stored as the
/// canonical residue mod 2^n; negative inputs are accepted and normalized).
struct LfParam {
  int n;
  double a;
  std::int64_t k_c;

  LfParam(int n, double a, std::int64_t k_c);

  std::int64_t grid_size() const { return std::int64_t{1} << n; }

  friend bool operator==(const LfParam&, const LfParam&) = default;
};

/// True when the two parameters describe numerically the same basis function
/// (used to reject proposals that would make overlap matrices singular).
bool effectively_equal(const LfParam& p, const LfParam& q,
                       double a_tol = 1e-9);

/// Linear combination of discrete Lorentzian states: coefficients `d` against
/// `params`. Coefficients are complex for state fitting; amplitude fitting
/// keeps them real.
struct LclfModel {
  std::vector<cdouble> d;
  std::vector<LfParam> params;

  int n_loc() const { return static_cast<int>(params.size()); }
  int n_qubits() const { return params.empty() ? 0 : params.front().n; }

  /// Throws if sizes mismatch, n_loc < 1, or the params span different grids.
  void validate() const;
};

/// Two-sided Slater normalization C_S(n, a) (profile peaked at 0, decaying
/// toward both ends of the periodic grid).
double slater_norm_const(int n, double a);

/// One-sided Slater normalization for the monotone profile e^{-a tau},
/// tau = 0..N-1. Used by the spectral-sampling input register.
double slater_norm_const_one_sided(int n, double a);

/// Amplitude S_j of the normalized two-sided discrete Slater function.
double slater_amplitude(int n, double a, std::int64_t j);

/// Amplitude L_k of the origin-centered discrete Lorentzian function.
/// `k` is interpreted mod 2^n. The full vector has unit 2-norm and equals the
/// unitary DFT of the Slater vector.
double lf_amplitude(int n, double a, std::int64_t k);

/// Dense amplitude vector of the shifted Lorentzian state, entry k equal to
/// L_{k - k_c}. Unit norm, maximal at index k_c.
std::vector<double> lf_state_vector(const LfParam& param);

/// Elementwise square of lf_state_vector; sums to 1.
std::vector<double> lf_sq_vector(const LfParam& param);

/// Closed-form overlap <L; a, k_c | L; a', 0>.
double lf_overlap(int n, double a, double a_prime, std::int64_t k_c);

/// Overlap of two squared Lorentzian vectors,
/// sum_k L^2_{k - k_delta}(n, a) L^2_k(n, a'). Evaluated as the explicit
/// O(N) sum over the closed-form amplitudes.
double lf_sq_overlap(int n, double a, double a_prime, std::int64_t k_delta);

}  // namespace lfr
