// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace lfr {

namespace {

using i64 = std::int64_t;

void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw capacity_error("statevector of " + std::to_string(n) +
                         " qubits outside [1, " + std::to_string(kMaxQubits) + "]");
  }
}

void check_qubit_index(const StateVector& s, int q) {
  if (q < 0 || q >= s.n) {
    throw std::out_of_range("qubit index " + std::to_string(q) +
                            " out of range for n=" + std::to_string(s.n));
  }
}

bool controls_satisfied(i64 idx, const std::vector<Control>& controls) {
  for (const Control& c : controls) {
    if (((idx >> c.qubit) & 1) != (c.value ? 1 : 0)) return false;
  }
  return true;
}

void validate_op(const StateVector& s, const CircuitOp& op) {
  for (int t : op.targets) check_qubit_index(s, t);
  for (const Control& c : op.controls) {
    check_qubit_index(s, c.qubit);
    for (int t : op.targets) {
      if (t == c.qubit) {
        throw std::invalid_argument("control qubit overlaps a target qubit");
      }
    }
  }
  for (std::size_t i = 0; i < op.targets.size(); ++i) {
    for (std::size_t j = i + 1; j < op.targets.size(); ++j) {
      if (op.targets[i] == op.targets[j]) {
        throw std::invalid_argument("duplicate target qubit in op");
      }
    }
  }
}

// 2x2 unitary {u00, u01, u10, u11} on `qubit`.
void apply_one_qubit(StateVector& s, int qubit, const cdouble u[4],
                     const std::vector<Control>& controls) {
  const i64 N = s.size();
  const i64 bit = i64{1} << qubit;
  for (i64 i = 0; i < N; ++i) {
    if (i & bit) continue;
    if (!controls_satisfied(i, controls)) continue;
    const cdouble a0 = s.amps[i];
    const cdouble a1 = s.amps[i | bit];
    s.amps[i] = u[0] * a0 + u[1] * a1;
    s.amps[i | bit] = u[2] * a0 + u[3] * a1;
  }
}

void apply_phase_z(StateVector& s, int qubit, double phi,
                   const std::vector<Control>& controls) {
  const i64 N = s.size();
  const i64 bit = i64{1} << qubit;
  const cdouble ph = std::polar(1.0, phi);
  for (i64 i = 0; i < N; ++i) {
    if (!(i & bit)) continue;
    if (!controls_satisfied(i, controls)) continue;
    s.amps[i] *= ph;
  }
}

void apply_swap(StateVector& s, int q1, int q2,
                const std::vector<Control>& controls) {
  const i64 N = s.size();
  const i64 b1 = i64{1} << q1;
  const i64 b2 = i64{1} << q2;
  for (i64 i = 0; i < N; ++i) {
    if (!(i & b1) || (i & b2)) continue;  // visit (q1=1, q2=0) once
    if (!controls_satisfied(i, controls)) continue;
    std::swap(s.amps[i], s.amps[(i & ~b1) | b2]);
  }
}

void apply_fanout(StateVector& s, const CircuitOp& op) {
  if (op.targets.size() < 2) {
    throw std::invalid_argument("fanout needs a control and at least one target");
  }
  const int control = op.targets.front();
  i64 mask = 0;
  for (std::size_t i = 1; i < op.targets.size(); ++i) {
    if (op.targets[i] == control) {
      throw std::invalid_argument("fanout control overlaps fanout target");
    }
    mask |= i64{1} << op.targets[i];
  }
  const i64 cbit = i64{1} << control;
  const i64 N = s.size();
  for (i64 i = 0; i < N; ++i) {
    if (!(i & cbit)) continue;
    const i64 j = i ^ mask;
    if (j < i) continue;
    if (!controls_satisfied(i, op.controls)) continue;
    std::swap(s.amps[i], s.amps[j]);
  }
}

void apply_qft(StateVector& s, const std::vector<int>& reg, bool inverse) {
  if (reg.empty()) throw std::invalid_argument("qft on empty register");
  const int m = static_cast<int>(reg.size());
  const cdouble h[4] = {cdouble(std::numbers::sqrt2 / 2.0), cdouble(std::numbers::sqrt2 / 2.0),
                        cdouble(std::numbers::sqrt2 / 2.0), cdouble(-std::numbers::sqrt2 / 2.0)};
  std::vector<Control> one_control(1);
  if (!inverse) {
    for (int i = m - 1; i >= 0; --i) {
      apply_one_qubit(s, reg[i], h, {});
      for (int t = i - 1; t >= 0; --t) {
        one_control[0] = Control{reg[t], true};
        apply_phase_z(s, reg[i], 2.0 * std::numbers::pi / std::ldexp(1.0, i - t + 1),
                      one_control);
      }
    }
    for (int i = 0; i < m / 2; ++i) apply_swap(s, reg[i], reg[m - 1 - i], {});
  } else {
    for (int i = 0; i < m / 2; ++i) apply_swap(s, reg[i], reg[m - 1 - i], {});
    for (int i = 0; i < m; ++i) {
      for (int t = 0; t < i; ++t) {
        one_control[0] = Control{reg[t], true};
        apply_phase_z(s, reg[i], -2.0 * std::numbers::pi / std::ldexp(1.0, i - t + 1),
                      one_control);
      }
      apply_one_qubit(s, reg[i], h, {});
    }
  }
}

i64 register_mask(const std::vector<int>& reg) {
  i64 mask = 0;
  for (int q : reg) mask |= i64{1} << q;
  return mask;
}

// Offset table: register value j -> contribution to the full index.
std::vector<i64> register_spread(const std::vector<int>& reg) {
  const std::size_t m = reg.size();
  std::vector<i64> spread(std::size_t{1} << m, 0);
  for (std::size_t j = 0; j < spread.size(); ++j) {
    i64 v = 0;
    for (std::size_t b = 0; b < m; ++b) {
      if ((j >> b) & 1) v |= i64{1} << reg[b];
    }
    spread[j] = v;
  }
  return spread;
}

void apply_diagonal_phase(StateVector& s, const CircuitOp& op) {
  const std::size_t M = std::size_t{1} << op.targets.size();
  if (op.phases.size() != M) {
    throw std::invalid_argument("diagonal phase table size mismatch");
  }
  std::vector<cdouble> table(M);
  for (std::size_t j = 0; j < M; ++j) {
    table[j] = std::polar(1.0, op.adjoint ? -op.phases[j] : op.phases[j]);
  }
  const std::vector<i64> spread = register_spread(op.targets);
  const i64 mask = register_mask(op.targets);
  const i64 N = s.size();
  for (i64 outer = 0; outer < N; ++outer) {
    if (outer & mask) continue;
    if (!controls_satisfied(outer, op.controls)) continue;
    for (std::size_t j = 0; j < M; ++j) s.amps[outer | spread[j]] *= table[j];
  }
}

// Some unitary taking the register from |0...0> to the given amplitudes:
// a Householder reflection through w = e0 - e^{-i gamma} c (gamma = arg c0)
// followed by the block phase e^{i gamma}.
void apply_state_prep(StateVector& s, const CircuitOp& op) {
  const std::size_t M = std::size_t{1} << op.targets.size();
  if (op.prep.size() != M) {
    throw std::invalid_argument("state prep amplitude count mismatch");
  }
  std::vector<cdouble> c(op.prep);
  double nrm = 0.0;
  for (const cdouble& v : c) nrm += std::norm(v);
  nrm = std::sqrt(nrm);
  if (std::abs(nrm - 1.0) > 1e-6) {
    throw std::invalid_argument("state prep amplitudes not normalized");
  }
  for (cdouble& v : c) v /= nrm;

  const double gamma = (std::abs(c[0]) > 0.0) ? std::arg(c[0]) : 0.0;
  const cdouble block_phase = std::polar(1.0, op.adjoint ? -gamma : gamma);
  const cdouble de_phase = std::polar(1.0, -gamma);
  std::vector<cdouble> w(M);
  double wnorm2 = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    w[j] = (j == 0 ? cdouble(1.0) : cdouble(0.0)) - de_phase * c[j];
    wnorm2 += std::norm(w[j]);
  }
  const bool reflect = wnorm2 > 1e-24;

  const std::vector<i64> spread = register_spread(op.targets);
  const i64 mask = register_mask(op.targets);
  const i64 N = s.size();
  for (i64 outer = 0; outer < N; ++outer) {
    if (outer & mask) continue;
    if (!controls_satisfied(outer, op.controls)) continue;
    if (op.adjoint) {
      for (std::size_t j = 0; j < M; ++j) s.amps[outer | spread[j]] *= block_phase;
    }
    if (reflect) {
      cdouble dot = 0.0;
      for (std::size_t j = 0; j < M; ++j) {
        dot += std::conj(w[j]) * s.amps[outer | spread[j]];
      }
      const cdouble coef = 2.0 * dot / wnorm2;
      for (std::size_t j = 0; j < M; ++j) s.amps[outer | spread[j]] -= coef * w[j];
    }
    if (!op.adjoint) {
      for (std::size_t j = 0; j < M; ++j) s.amps[outer | spread[j]] *= block_phase;
    }
  }
}

}  // namespace

StateVector StateVector::zero_state(int n) {
  check_qubit_count(n);
  StateVector s;
  s.n = n;
  s.amps.assign(std::size_t{1} << n, cdouble(0.0));
  s.amps[0] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(int n, std::vector<cdouble> amps,
                                         double norm_tol) {
  check_qubit_count(n);
  if (amps.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("amplitude count must be 2^n");
  }
  StateVector s;
  s.n = n;
  s.amps = std::move(amps);
  const double nrm = s.norm();
  if (std::abs(nrm - 1.0) > norm_tol) {
    throw std::invalid_argument("amplitudes not normalized: |norm - 1| = " +
                                std::to_string(std::abs(nrm - 1.0)));
  }
  for (cdouble& a : s.amps) a /= nrm;
  return s;
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const cdouble& a : amps) sum += std::norm(a);
  return std::sqrt(sum);
}

cdouble inner_product(const StateVector& a, const StateVector& b) {
  if (a.n != b.n) throw std::invalid_argument("inner product needs equal registers");
  cdouble sum = 0.0;
  for (i64 i = 0; i < a.size(); ++i) sum += std::conj(a.amps[i]) * b.amps[i];
  return sum;
}

double fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

double bit_probability(const StateVector& state, int qubit, bool value) {
  check_qubit_index(state, qubit);
  const i64 bit = i64{1} << qubit;
  double p = 0.0;
  for (i64 i = 0; i < state.size(); ++i) {
    if (((i & bit) != 0) == value) p += std::norm(state.amps[i]);
  }
  return p;
}

std::vector<double> register_probabilities(const StateVector& state,
                                           std::span<const int> reg) {
  for (int q : reg) check_qubit_index(state, q);
  std::vector<double> probs(std::size_t{1} << reg.size(), 0.0);
  for (i64 i = 0; i < state.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t b = 0; b < reg.size(); ++b) {
      if ((i >> reg[b]) & 1) j |= std::size_t{1} << b;
    }
    probs[j] += std::norm(state.amps[i]);
  }
  return probs;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  check_qubit_count(a.n + b.n);
  StateVector out;
  out.n = a.n + b.n;
  out.amps.assign(std::size_t{1} << out.n, cdouble(0.0));
  const i64 Na = a.size();
  for (i64 jb = 0; jb < b.size(); ++jb) {
    if (b.amps[jb] == cdouble(0.0)) continue;
    for (i64 ja = 0; ja < Na; ++ja) {
      out.amps[jb * Na + ja] = b.amps[jb] * a.amps[ja];
    }
  }
  return out;
}

CircuitOp CircuitOp::ry(int qubit, double angle) {
  return {GateKind::RY, {qubit}, {}, angle, {}, {}, false};
}
CircuitOp CircuitOp::phase_z(int qubit, double phi) {
  return {GateKind::PhaseZ, {qubit}, {}, phi, {}, {}, false};
}
CircuitOp CircuitOp::h(int qubit) {
  return {GateKind::Hadamard, {qubit}, {}, 0.0, {}, {}, false};
}
CircuitOp CircuitOp::x(int qubit) {
  return {GateKind::PauliX, {qubit}, {}, 0.0, {}, {}, false};
}
CircuitOp CircuitOp::z(int qubit) {
  return {GateKind::PauliZ, {qubit}, {}, 0.0, {}, {}, false};
}
CircuitOp CircuitOp::cnot(int control, int target) {
  return CircuitOp::x(target).with_control(control, true);
}
CircuitOp CircuitOp::swap(int q1, int q2) {
  return {GateKind::Swap, {q1, q2}, {}, 0.0, {}, {}, false};
}
CircuitOp CircuitOp::fanout(int control, std::vector<int> targets) {
  std::vector<int> all{control};
  all.insert(all.end(), targets.begin(), targets.end());
  return {GateKind::Fanout, std::move(all), {}, 0.0, {}, {}, false};
}
CircuitOp CircuitOp::qft(std::vector<int> reg) {
  return {GateKind::Qft, std::move(reg), {}, 0.0, {}, {}, false};
}
CircuitOp CircuitOp::inverse_qft(std::vector<int> reg) {
  return {GateKind::InverseQft, std::move(reg), {}, 0.0, {}, {}, false};
}
CircuitOp CircuitOp::diagonal_phase(std::vector<int> reg, std::vector<double> phases) {
  return {GateKind::DiagonalPhase, std::move(reg), {}, 0.0, std::move(phases), {}, false};
}
CircuitOp CircuitOp::state_prep(std::vector<int> reg, std::vector<cdouble> amplitudes) {
  return {GateKind::StatePrep, std::move(reg), {}, 0.0, {}, std::move(amplitudes), false};
}

CircuitOp CircuitOp::with_control(int qubit, bool value) const {
  CircuitOp op = *this;
  op.controls.push_back({qubit, value});
  return op;
}

CircuitOp CircuitOp::inverse() const {
  CircuitOp op = *this;
  switch (kind) {
    case GateKind::RY:
    case GateKind::PhaseZ:
      op.angle = -angle;
      break;
    case GateKind::Hadamard:
    case GateKind::PauliX:
    case GateKind::PauliZ:
    case GateKind::Swap:
    case GateKind::Fanout:
      break;  // self-inverse
    case GateKind::Qft:
      op.kind = GateKind::InverseQft;
      break;
    case GateKind::InverseQft:
      op.kind = GateKind::Qft;
      break;
    case GateKind::DiagonalPhase:
    case GateKind::StatePrep:
      op.adjoint = !adjoint;
      break;
  }
  return op;
}

Circuit inverse_circuit(const Circuit& ops) {
  Circuit inv;
  inv.reserve(ops.size());
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) inv.push_back(it->inverse());
  return inv;
}

StateVector apply(StateVector state, const CircuitOp& op) {
  validate_op(state, op);
  switch (op.kind) {
    case GateKind::RY: {
      const double c = std::cos(op.angle / 2.0), s = std::sin(op.angle / 2.0);
      const cdouble u[4] = {c, -s, s, c};
      apply_one_qubit(state, op.targets[0], u, op.controls);
      break;
    }
    case GateKind::PhaseZ:
      apply_phase_z(state, op.targets[0], op.angle, op.controls);
      break;
    case GateKind::Hadamard: {
      const double r = std::numbers::sqrt2 / 2.0;
      const cdouble u[4] = {r, r, r, -r};
      apply_one_qubit(state, op.targets[0], u, op.controls);
      break;
    }
    case GateKind::PauliX: {
      const cdouble u[4] = {0.0, 1.0, 1.0, 0.0};
      apply_one_qubit(state, op.targets[0], u, op.controls);
      break;
    }
    case GateKind::PauliZ: {
      const cdouble u[4] = {1.0, 0.0, 0.0, -1.0};
      apply_one_qubit(state, op.targets[0], u, op.controls);
      break;
    }
    case GateKind::Swap:
      apply_swap(state, op.targets[0], op.targets[1], op.controls);
      break;
    case GateKind::Fanout:
      apply_fanout(state, op);
      break;
    case GateKind::Qft:
    case GateKind::InverseQft:
      if (!op.controls.empty()) {
        throw std::invalid_argument("controlled QFT is not supported");
      }
      apply_qft(state, op.targets, op.kind == GateKind::InverseQft);
      break;
    case GateKind::DiagonalPhase:
      apply_diagonal_phase(state, op);
      break;
    case GateKind::StatePrep:
      apply_state_prep(state, op);
      break;
  }
  return state;
}

StateVector apply_circuit(StateVector state, const Circuit& ops) {
  for (const CircuitOp& op : ops) state = apply(std::move(state), op);
  return state;
}

}  // namespace lfr
