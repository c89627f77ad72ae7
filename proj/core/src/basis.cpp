// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lfr {

namespace {

void check_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("qubit count must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n));
  }
}

void check_decay_rate(double a) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("decay rate must be positive, got " +
                                std::to_string(a));
  }
  if (a < kMinDecayRate) {
    throw std::invalid_argument("decay rate " + std::to_string(a) +
                                " below minimum " + std::to_string(kMinDecayRate));
  }
}

std::int64_t mod_grid(std::int64_t k, std::int64_t N) {
  return ((k % N) + N) % N;
}

// L_k for all k in [0, N) with constants hoisted out of the loop.
std::vector<double> lf_profile(int n, double a) {
  const std::int64_t N = std::int64_t{1} << n;
  const double Nd = static_cast<double>(N);
  const double scale = slater_norm_const(n, a) / std::sqrt(Nd);
  const double one_minus = -std::expm1(-2.0 * a);
  const double half_tail = std::exp(-a * Nd / 2.0);
  const double ea = std::exp(-a);
  const double e2a = std::exp(-2.0 * a);
  std::vector<double> out(static_cast<std::size_t>(N));
  for (std::int64_t k = 0; k < N; ++k) {
    const double parity = (k % 2 == 0) ? 1.0 : -1.0;
    const double num = one_minus * (1.0 - parity * half_tail);
    const double den =
        1.0 - 2.0 * ea * std::cos(2.0 * std::numbers::pi * double(k) / Nd) + e2a;
    out[static_cast<std::size_t>(k)] = scale * num / den;
  }
  return out;
}

}  // namespace

LfParam::LfParam(int n_in, double a_in, std::int64_t k_c_in)
    : n(n_in), a(a_in), k_c(0) {
  check_qubits(n);
  check_decay_rate(a);
  k_c = mod_grid(k_c_in, grid_size());
}

bool effectively_equal(const LfParam& p, const LfParam& q, double a_tol) {
  return p.n == q.n && p.k_c == q.k_c && std::abs(p.a - q.a) < a_tol;
}

void LclfModel::validate() const {
  if (params.empty()) throw std::invalid_argument("model needs n_loc >= 1");
  if (d.size() != params.size()) {
    throw std::invalid_argument("coefficient/parameter length mismatch");
  }
  for (const LfParam& p : params) {
    if (p.n != params.front().n) {
      throw std::invalid_argument("all basis functions must share one grid");
    }
  }
}

double slater_norm_const(int n, double a) {
  check_qubits(n);
  check_decay_rate(a);
  const double Nd = std::ldexp(1.0, n);
  const double num = -std::expm1(-2.0 * a);
  const double den = (1.0 + std::exp(-2.0 * a)) * (-std::expm1(-Nd * a));
  return std::sqrt(num / den);
}

double slater_norm_const_one_sided(int n, double a) {
  check_qubits(n);
  check_decay_rate(a);
  const double Nd = std::ldexp(1.0, n);
  return std::sqrt(-std::expm1(-2.0 * a) / -std::expm1(-2.0 * a * Nd));
}

double slater_amplitude(int n, double a, std::int64_t j) {
  check_qubits(n);
  check_decay_rate(a);
  const std::int64_t N = std::int64_t{1} << n;
  if (j < 0 || j >= N) {
    throw std::invalid_argument("grid index " + std::to_string(j) +
                                " out of range [0, " + std::to_string(N) + ")");
  }
  const double dist = (j < N / 2) ? double(j) : double(N - j);
  return slater_norm_const(n, a) * std::exp(-a * dist);
}

double lf_amplitude(int n, double a, std::int64_t k) {
  check_qubits(n);
  check_decay_rate(a);
  const std::int64_t N = std::int64_t{1} << n;
  k = mod_grid(k, N);
  const double Nd = static_cast<double>(N);
  const double parity = (k % 2 == 0) ? 1.0 : -1.0;
  const double num =
      (-std::expm1(-2.0 * a)) * (1.0 - parity * std::exp(-a * Nd / 2.0));
  const double den =
      1.0 - 2.0 * std::exp(-a) * std::cos(2.0 * std::numbers::pi * double(k) / Nd) +
      std::exp(-2.0 * a);
  return slater_norm_const(n, a) / std::sqrt(Nd) * num / den;
}

std::vector<double> lf_state_vector(const LfParam& param) {
  const std::vector<double> profile = lf_profile(param.n, param.a);
  const std::int64_t N = param.grid_size();
  std::vector<double> out(static_cast<std::size_t>(N));
  for (std::int64_t k = 0; k < N; ++k) {
    out[static_cast<std::size_t>(k)] =
        profile[static_cast<std::size_t>(mod_grid(k - param.k_c, N))];
  }
  return out;
}

std::vector<double> lf_sq_vector(const LfParam& param) {
  std::vector<double> out = lf_state_vector(param);
  for (double& v : out) v *= v;
  return out;
}

double lf_overlap(int n, double a, double a_prime, std::int64_t k_c) {
  check_qubits(n);
  check_decay_rate(a);
  check_decay_rate(a_prime);
  const std::int64_t N = std::int64_t{1} << n;
  k_c = mod_grid(k_c, N);
  const double Nd = static_cast<double>(N);
  const double A = a + a_prime;
  const double parity = (k_c % 2 == 0) ? 1.0 : -1.0;
  const double peak_factor = 1.0 - parity * std::exp(-A * Nd / 2.0);
  // sinh(A) / (cosh(A) - cos t), rewritten with e^{-A} so large A cannot
  // overflow.
  const double eA = std::exp(-A);
  const double e2A = eA * eA;
  const double ratio =
      (1.0 - e2A) /
      (1.0 + e2A - 2.0 * eA * std::cos(2.0 * std::numbers::pi * double(k_c) / Nd));
  return slater_norm_const(n, a) * slater_norm_const(n, a_prime) * peak_factor *
         ratio;
}

double lf_sq_overlap(int n, double a, double a_prime, std::int64_t k_delta) {
  check_qubits(n);
  const std::int64_t N = std::int64_t{1} << n;
  k_delta = mod_grid(k_delta, N);
  const std::vector<double> p = lf_profile(n, a);
  const std::vector<double> q = lf_profile(n, a_prime);
  double sum = 0.0;
  for (std::int64_t k = 0; k < N; ++k) {
    const double pk = p[static_cast<std::size_t>(mod_grid(k - k_delta, N))];
    const double qk = q[static_cast<std::size_t>(k)];
    sum += pk * pk * qk * qk;
  }
  return sum;
}

}  // namespace lfr
