// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "lfr/common.hpp"

namespace lfr {

/// Dense complex amplitude vector over 2^n basis states. Qubit m carries
/// weight 2^m in the basis index (little-endian throughout).
struct StateVector {
  int n = 0;
  std::vector<cdouble> amps;

  static StateVector zero_state(int n);

  /// Wraps the given amplitudes; throws if the length is not 2^n or the norm
  /// is off by more than `norm_tol`.
  static StateVector from_amplitudes(int n, std::vector<cdouble> amps,
                                     double norm_tol = 1e-6);

  std::int64_t size() const { return std::int64_t{1} << n; }
  double norm() const;
};

cdouble inner_product(const StateVector& a, const StateVector& b);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

/// Probability of reading `value` on `qubit` in the computational basis.
double bit_probability(const StateVector& state, int qubit, bool value);

/// Marginal probabilities of an ordered qubit register (LSB first).
std::vector<double> register_probabilities(const StateVector& state,
                                           std::span<const int> reg);

/// b placed on the qubits above a: index = jb * 2^{a.n} + ja.
StateVector tensor(const StateVector& a, const StateVector& b);

struct Control {
  int qubit;
  bool value;
};

enum class GateKind {
  RY,
  PhaseZ,
  Hadamard,
  PauliX,
  PauliZ,
  Swap,
  Fanout,
  Qft,
  InverseQft,
  DiagonalPhase,
  StatePrep,
};

/// One circuit operation. Any op may carry additional (anti-)controls, which
/// is how controlled unitaries are expressed: controlling a gate sequence is
/// the same unitary as controlling each gate in it.
///
/// Register ops (Qft, InverseQft, DiagonalPhase, StatePrep) list their qubits
/// LSB first. Qft uses the kernel e^{+2 pi i jk / 2^m} / sqrt(2^m);
/// InverseQft its adjoint.
struct CircuitOp {
  GateKind kind;
  std::vector<int> targets;
  std::vector<Control> controls;
  double angle = 0.0;                // RY (full rotation angle), PhaseZ
  std::vector<double> phases;        // DiagonalPhase: e^{i phases[j]} on value j
  std::vector<cdouble> prep;         // StatePrep: image of |0...0> on the register
  bool adjoint = false;              // DiagonalPhase / StatePrep inverse

  static CircuitOp ry(int qubit, double angle);
  static CircuitOp phase_z(int qubit, double phi);
  static CircuitOp h(int qubit);
  static CircuitOp x(int qubit);
  static CircuitOp z(int qubit);
  static CircuitOp cnot(int control, int target);
  static CircuitOp swap(int q1, int q2);
  static CircuitOp fanout(int control, std::vector<int> targets);
  static CircuitOp qft(std::vector<int> reg);
  static CircuitOp inverse_qft(std::vector<int> reg);
  static CircuitOp diagonal_phase(std::vector<int> reg, std::vector<double> phases);
  static CircuitOp state_prep(std::vector<int> reg, std::vector<cdouble> amplitudes);

  CircuitOp with_control(int qubit, bool value) const;
  CircuitOp inverse() const;
};

using Circuit = std::vector<CircuitOp>;

Circuit inverse_circuit(const Circuit& ops);

/// Applies one op and returns the new state (value semantics; the argument is
/// taken by value so callers can move through a pipeline).
StateVector apply(StateVector state, const CircuitOp& op);

StateVector apply_circuit(StateVector state, const Circuit& ops);

}  // namespace lfr
