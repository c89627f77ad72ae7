// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace lfr {

namespace {

using i64 = std::int64_t;

void check_capacity(int total) {
  if (total > kMaxQubits) {
    throw capacity_error("circuit needs " + std::to_string(total) +
                         " qubits, cap is " + std::to_string(kMaxQubits));
  }
}

std::vector<int> make_range(int offset, int count) {
  std::vector<int> reg(count);
  for (int i = 0; i < count; ++i) reg[i] = offset + i;
  return reg;
}

// S0 = 2|0...0><0...0| - I on the whole register.
void reflect_about_zero(StateVector& s) {
  for (i64 i = 1; i < s.size(); ++i) s.amps[i] = -s.amps[i];
}

void negate(StateVector& s) {
  for (cdouble& a : s.amps) a = -a;
}

}  // namespace

Circuit slater_prep_ops(int n, double a, int offset) {
  if (n < 1) throw std::invalid_argument("need at least one qubit");
  if (!(a > 0.0)) throw std::invalid_argument("decay rate must be positive");
  Circuit ops;
  for (int m = 0; m < n; ++m) {
    const double theta = (m == n - 1) ? std::atan(std::exp(-a))
                                      : std::atan(std::exp(-std::ldexp(a, m)));
    ops.push_back(CircuitOp::ry(offset + m, 2.0 * theta));
  }
  if (n >= 2) {
    ops.push_back(CircuitOp::fanout(offset + n - 1, make_range(offset, n - 1)));
  }
  return ops;
}

StateVector prepare_slater(int n, double a) {
  check_capacity(n);
  return apply_circuit(StateVector::zero_state(n), slater_prep_ops(n, a));
}

Circuit shifted_lf_prep_ops(const LfParam& param, int offset) {
  const double Nd = static_cast<double>(param.grid_size());
  Circuit ops = slater_prep_ops(param.n, param.a, offset);
  for (int m = 0; m < param.n; ++m) {
    const double phi = 2.0 * std::numbers::pi * double(param.k_c) *
                       std::ldexp(1.0, m) / Nd;
    ops.push_back(CircuitOp::phase_z(offset + m, phi));
  }
  ops.push_back(CircuitOp::inverse_qft(make_range(offset, param.n)));
  return ops;
}

StateVector prepare_shifted_lf(const LfParam& param) {
  check_capacity(param.n);
  return apply_circuit(StateVector::zero_state(param.n),
                       shifted_lf_prep_ops(param));
}

StateVector build_doubled_target(const StateVector& target) {
  const int n = target.n;
  check_capacity(2 * n);
  StateVector doubled = tensor(target, StateVector::zero_state(n));
  for (int i = 0; i < n; ++i) {
    doubled = apply(std::move(doubled), CircuitOp::cnot(i, n + i));
  }
  return doubled;
}

double switch_test(const StateVector& u1_state, const StateVector& u2_state,
                   double phi) {
  if (u1_state.n != u2_state.n) {
    throw std::invalid_argument("switch test needs equal qubit counts");
  }
  const int n = u1_state.n;
  check_capacity(n + 1);
  const int anc = n;
  const std::vector<int> reg = make_range(0, n);

  StateVector s = StateVector::zero_state(n + 1);
  s = apply(std::move(s), CircuitOp::h(anc));
  s = apply(std::move(s), CircuitOp::phase_z(anc, phi));
  s = apply(std::move(s),
            CircuitOp::state_prep(reg, u1_state.amps).with_control(anc, false));
  s = apply(std::move(s),
            CircuitOp::state_prep(reg, u2_state.amps).with_control(anc, true));
  s = apply(std::move(s), CircuitOp::h(anc));
  return bit_probability(s, anc, false);
}

double swap_test(const StateVector& lf, const StateVector& doubled_target) {
  if (doubled_target.n % 2 != 0) {
    throw std::invalid_argument("doubled target must span an even qubit count");
  }
  const int n = doubled_target.n / 2;
  const int n_lf = lf.n;
  check_capacity(2 * n + n_lf + 1);
  const int lf_base = 2 * n;
  const int anc = 2 * n + n_lf;

  StateVector s = tensor(doubled_target, lf);
  s = tensor(s, StateVector::zero_state(1));

  const int n_swap = std::min(n_lf, n);
  s = apply(std::move(s), CircuitOp::h(anc));
  for (int i = 0; i < n_swap; ++i) {
    // align the most significant qubits of the larger register
    const int lf_q = lf_base + (n_lf - n_swap) + i;
    const int copy_q = n + (n - n_swap) + i;
    s = apply(std::move(s), CircuitOp::swap(lf_q, copy_q).with_control(anc, true));
  }
  s = apply(std::move(s), CircuitOp::h(anc));
  return bit_probability(s, anc, false);
}

AaSpectrum aa_operator_spectrum(const LfParam& lf, const StateVector& target) {
  if (lf.n != target.n) {
    throw std::invalid_argument("amplification circuit needs matching registers");
  }
  const int n = target.n;
  check_capacity(3 * n + 1);
  const int anc = 3 * n;

  // Swap-test preparation: target prep, doubling CNOTs, basis-state prep on
  // the third register, Hadamard-sandwiched controlled swaps.
  Circuit prep;
  prep.push_back(CircuitOp::state_prep(make_range(0, n), target.amps));
  for (int i = 0; i < n; ++i) prep.push_back(CircuitOp::cnot(i, n + i));
  {
    Circuit lf_ops = shifted_lf_prep_ops(lf, 2 * n);
    prep.insert(prep.end(), lf_ops.begin(), lf_ops.end());
  }
  prep.push_back(CircuitOp::h(anc));
  for (int i = 0; i < n; ++i) {
    prep.push_back(CircuitOp::swap(2 * n + i, n + i).with_control(anc, true));
  }
  prep.push_back(CircuitOp::h(anc));
  const Circuit unprep = inverse_circuit(prep);

  const StateVector psi = apply_circuit(StateVector::zero_state(3 * n + 1), prep);
  const double p0 = bit_probability(psi, anc, false);

  AaSpectrum out;
  out.p0 = p0;
  const double eps = 1e-12;
  if (p0 < eps || p0 > 1.0 - eps) {
    out.degenerate = true;
    out.theta_a = std::asin(std::sqrt(std::clamp(p0, 0.0, 1.0)));
    return out;
  }

  // Normalized good/bad components of psi.
  const i64 N = psi.size();
  const i64 anc_bit = i64{1} << anc;
  StateVector good = psi, bad = psi;
  for (i64 i = 0; i < N; ++i) {
    if (i & anc_bit) {
      good.amps[i] = 0.0;
    } else {
      bad.amps[i] = 0.0;
    }
  }
  const double gn = good.norm(), bn = bad.norm();
  for (cdouble& v : good.amps) v /= gn;
  for (cdouble& v : bad.amps) v /= bn;

  const auto apply_q = [&](StateVector v) {
    v = apply(std::move(v), CircuitOp::z(anc));  // oracle: flips the bad branch
    v = apply_circuit(std::move(v), unprep);
    reflect_about_zero(v);
    v = apply_circuit(std::move(v), prep);
    negate(v);
    return v;
  };

  const StateVector qg = apply_q(good);
  const StateVector qb = apply_q(bad);
  const cdouble m00 = inner_product(good, qg);
  const cdouble m01 = inner_product(good, qb);
  const cdouble m10 = inner_product(bad, qg);
  const cdouble m11 = inner_product(bad, qb);

  // Leakage of Q out of span{good, bad}.
  double leak2 = 0.0;
  for (i64 i = 0; i < N; ++i) {
    const cdouble rg = qg.amps[i] - m00 * good.amps[i] - m10 * bad.amps[i];
    const cdouble rb = qb.amps[i] - m01 * good.amps[i] - m11 * bad.amps[i];
    leak2 = std::max(leak2, std::norm(rg) + std::norm(rb));
  }
  out.subspace_leakage = std::sqrt(leak2);

  // Eigenvalues of the 2x2 restriction.
  const cdouble tr = m00 + m11;
  const cdouble det = m00 * m11 - m01 * m10;
  const cdouble disc = std::sqrt(tr * tr - 4.0 * det);
  const cdouble l1 = 0.5 * (tr + disc);
  const cdouble l2 = 0.5 * (tr - disc);
  out.eigenvalue_error =
      std::max(std::abs(std::abs(l1) - 1.0), std::abs(std::abs(l2) - 1.0));
  out.block = {m00, m01, m10, m11};
  const cdouble lam = (std::imag(l1) >= 0.0) ? l1 : l2;
  out.theta_a = std::abs(std::arg(lam)) / 2.0;
  return out;
}

}  // namespace lfr
