// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lfr {

using cdouble = std::complex<double>;

/// Hard cap on the total qubit count of any dense statevector (and on the
/// grid size 2^n of any basis function). 2^22 complex doubles = 64 MiB.
inline constexpr int kMaxQubits = 22;

/// Decay rates below this are rejected: the Slater normalization loses all
/// relative precision in 1 - e^{-2a}.
inline constexpr double kMinDecayRate = 1e-6;

/// Thrown when a requested register would exceed kMaxQubits.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed experiment configs and input files.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lfr
