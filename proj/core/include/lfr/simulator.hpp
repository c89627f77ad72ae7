// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "lfr/basis.hpp"
#include "lfr/statevector.hpp"

namespace lfr {

/// Gate sequence preparing the two-sided discrete Slater state on qubits
/// [offset, offset + n): one RY layer followed by the fanout gate.
Circuit slater_prep_ops(int n, double a, int offset = 0);

StateVector prepare_slater(int n, double a);

/// Gate sequence preparing the shifted discrete Lorentzian state
/// |L; a, k_c> on qubits [offset, offset + n): Slater prep, one single-qubit
/// phase gate per qubit, and a trailing inverse QFT. The phase angles are
/// +2 pi k_c 2^m / N on qubit m, which together with the inverse-QFT kernel
/// e^{-2 pi i jk/N} centers the peak at +k_c.
Circuit shifted_lf_prep_ops(const LfParam& param, int offset = 0);

StateVector prepare_shifted_lf(const LfParam& param);

/// target (n qubits) -> sum_k c_k |k>|k> on 2n qubits via transversal CNOTs.
/// The original register stays on qubits [0, n), the copy on [n, 2n).
StateVector build_doubled_target(const StateVector& target);

/// Exact ancilla-0 probability of the interference test on |phi1>, |phi2>
/// with phase setting phi, simulated gate by gate:
/// P_0 = (1 + Re e^{i phi} <phi1|phi2>) / 2.
double switch_test(const StateVector& u1_state, const StateVector& u2_state,
                   double phi);

/// Exact ancilla-0 probability of the controlled-swap test between an
/// n_lf-qubit state and one half of a doubled 2n-qubit target. When the
/// register sizes differ, the most significant qubits of the larger register
/// are swapped (the smaller register sees the larger one averaged over its
/// least significant qubits).
double swap_test(const StateVector& lf, const StateVector& doubled_target);

struct AaSpectrum {
  double theta_a = 0.0;        // sin^2(theta_a) = ancilla-0 probability
  double p0 = 0.0;             // ancilla-0 probability of the prepared state
  bool degenerate = false;     // p0 in {0, 1}: no rotation, theta exact
  double eigenvalue_error = 0.0;   // max | |lambda| - 1 | over the 2x2 block
  double subspace_leakage = 0.0;   // residual of Q leaving span{good, bad}
  std::array<cdouble, 4> block{};  // Q restricted to {good, bad}, row major
};

/// Builds the amplification operator Q = -U S0 U^dag S_chi for the swap-test
/// preparation U of (lf, target), restricts it to the 2D span of the good
/// (ancilla 0) and bad (ancilla 1) components of U|0>, and extracts the
/// rotation angle theta_a from its eigenphases e^{+-2 i theta_a}.
AaSpectrum aa_operator_spectrum(const LfParam& lf, const StateVector& target);

}  // namespace lfr
