// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "lfr/qpe.hpp"
#include "lfr/rng.hpp"

using namespace lfr;

namespace {

SpectralProblem two_level_problem() {
  SpectralProblem p;
  p.n = 6;
  p.n_s = 2;
  p.t0 = 1.0;
  p.a = 0.18;
  p.eigenvalues = {17.3, 43.9};
  p.weights = {0.4, 0.6};
  return p;
}

}  // namespace

TEST_CASE("phase-register kernel") {
  SUBCASE("closed form equals the direct geometric sum") {
    const int n = 8;
    const std::int64_t N = 256;
    Rng rng(41);
    for (int trial = 0; trial < 40; ++trial) {
      const double a = 0.02 + rng.uniform();
      const double x = (rng.uniform() - 0.5) * 300.0;
      cdouble direct = 0.0;
      for (std::int64_t tau = 0; tau < N; ++tau) {
        direct += std::exp(-a * double(tau)) *
                  std::polar(1.0, 2.0 * std::numbers::pi * double(tau) * x / double(N));
      }
      direct *= slater_norm_const_one_sided(n, a) / std::sqrt(double(N));
      CHECK(std::abs(alpha_lf(x, n, a) - direct) < 1e-12);
    }
  }
  SUBCASE("value at the origin") {
    const int n = 7;
    const double a = 0.23;
    const double N = 128.0;
    const double expected = slater_norm_const_one_sided(n, a) / std::sqrt(N) *
                            (-std::expm1(-a * N)) / (-std::expm1(-a));
    CHECK(std::abs(alpha_lf(0.0, n, a) - expected) < 1e-13);
  }
  SUBCASE("peak height approaches the small-width limit") {
    // |alpha(0)|^2 ~ C^2 / (N a^2), valid for a << 1 << a N
    const int n = 10;
    const double a = 0.05;
    const double c2 = slater_norm_const_one_sided(n, a) *
                      slater_norm_const_one_sided(n, a);
    const double approx = c2 / (1024.0 * a * a);
    CHECK(std::norm(alpha_lf(0.0, n, a)) ==
          doctest::Approx(approx).epsilon(3.0 * a));
  }
  SUBCASE("shifted kernel values form a unit distribution") {
    const int n = 6;
    const double a = 0.31;
    const double x0 = 13.77;
    double total = 0.0;
    for (std::int64_t k = 0; k < 64; ++k) {
      total += std::norm(alpha_lf(x0 - double(k), n, a));
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("exact readout histograms") {
  SUBCASE("integer eigenvalue with a narrow profile concentrates") {
    SpectralProblem p;
    p.n = 5;
    p.n_s = 1;
    p.t0 = 1.0;
    p.a = 1e-5;  // near the uniform-register limit
    p.eigenvalues = {9.0, 20.0};
    p.weights = {1.0, 0.0};
    const QpeHistogram hist = qpe_exact_histogram(p);
    CHECK(hist.probabilities[9] > 1.0 - 1e-3);
  }
  SUBCASE("probabilities sum to one") {
    const QpeHistogram hist = qpe_exact_histogram(two_level_problem());
    double total = 0.0;
    for (double v : hist.probabilities) total += v;
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
  SUBCASE("permuting the levels leaves the histogram unchanged") {
    SpectralProblem p = two_level_problem();
    SpectralProblem q = p;
    std::swap(q.eigenvalues[0], q.eigenvalues[1]);
    std::swap(q.weights[0], q.weights[1]);
    const QpeHistogram a = qpe_exact_histogram(p);
    const QpeHistogram b = qpe_exact_histogram(q);
    for (std::size_t k = 0; k < a.probabilities.size(); ++k) {
      CHECK(a.probabilities[k] == doctest::Approx(b.probabilities[k]).epsilon(1e-13));
    }
  }
  SUBCASE("two equal peaks match the reference profile in the peak regions") {
    SpectralProblem p;
    p.n = 9;
    p.n_s = 1;
    p.t0 = 1.0;
    p.a = 20.0 / 512.0;
    p.eigenvalues = {128.0, 338.7};
    p.weights = {0.5, 0.5};
    const QpeHistogram hist = qpe_exact_histogram(p);
    const std::vector<double> ref = lorentzian_reference(p);
    double peak = 0.0;
    for (double v : hist.probabilities) peak = std::max(peak, v);
    for (std::size_t k = 0; k < hist.probabilities.size(); ++k) {
      if (hist.probabilities[k] >= 0.01 * peak) {
        CHECK(std::abs(hist.probabilities[k] - ref[k]) <=
              0.05 * hist.probabilities[k]);
      }
    }
  }
}

TEST_CASE("circuit-simulated histograms") {
  SUBCASE("match the closed form") {
    const SpectralProblem p = two_level_problem();
    const QpeHistogram exact = qpe_exact_histogram(p);
    const QpeHistogram circuit = qpe_circuit_histogram(p);
    for (std::size_t k = 0; k < exact.probabilities.size(); ++k) {
      CHECK(std::abs(exact.probabilities[k] - circuit.probabilities[k]) < 1e-9);
    }
  }
  SUBCASE("match on randomized problems") {
    Rng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
      SpectralProblem p;
      p.n = 6;
      p.n_s = 2;
      p.t0 = 0.5 + rng.uniform();
      p.a = 0.05 + rng.uniform() * 0.5;
      const double w0 = rng.uniform();
      const double w1 = rng.uniform() * (1.0 - w0);
      p.eigenvalues = {rng.uniform() * 60.0, rng.uniform() * 60.0,
                       rng.uniform() * 60.0};
      p.weights = {w0, w1, 1.0 - w0 - w1};
      const QpeHistogram exact = qpe_exact_histogram(p);
      const QpeHistogram circuit = qpe_circuit_histogram(p);
      for (std::size_t k = 0; k < exact.probabilities.size(); ++k) {
        CHECK(std::abs(exact.probabilities[k] - circuit.probabilities[k]) < 1e-9);
      }
    }
  }
  SUBCASE("uniform register limit reproduces the standard kernel") {
    SpectralProblem p;
    p.n = 5;
    p.n_s = 1;
    p.t0 = 1.0;
    p.a = 1e-5;
    p.eigenvalues = {11.3, 0.0};
    p.weights = {1.0, 0.0};
    const QpeHistogram hist = qpe_circuit_histogram(p);
    const double x0 = p.t0 * 11.3;
    for (std::int64_t k = 0; k < 32; ++k) {
      // |(1/N) sum_j e^{2 pi i j (x0 - k)/N}|^2
      const double x = x0 - double(k);
      const double s = std::sin(std::numbers::pi * x / 32.0);
      const double kernel = (std::abs(s) < 1e-12)
                                ? 1.0
                                : std::pow(std::sin(std::numbers::pi * x) /
                                               (32.0 * s),
                                           2.0);
      CHECK(hist.probabilities[k] == doctest::Approx(kernel).epsilon(2e-3));
    }
  }
}

TEST_CASE("swap tests against the phase register") {
  const SpectralProblem p = two_level_problem();
  SUBCASE("dropping the paired inverse transforms changes nothing") {
    for (std::int64_t kc : {0, 17, 44}) {
      const LfParam lf(p.n, 0.25, kc);
      const double full = qpe_swap_test_probability(p, lf, false);
      const double omitted = qpe_swap_test_probability(p, lf, true);
      CHECK(std::abs(full - omitted) < 1e-10);
    }
  }
  SUBCASE("marginal overlap equals the histogram dot product") {
    const LfParam lf(p.n, 0.2, 18);
    const QpeHistogram hist = qpe_exact_histogram(p);
    const std::vector<double> lsq = lf_sq_vector(lf);
    double expected = 0.0;
    for (std::size_t k = 0; k < lsq.size(); ++k) {
      expected += hist.probabilities[k] * lsq[k];
    }
    const OverlapEstimate e = qpe_swap_overlap(p, lf, MeasurementBudget{});
    CHECK(std::abs(std::real(e.value) - expected) < 1e-12);
  }
  SUBCASE("matches the squared-overlap estimator on the full output state") {
    const StateVector joint = qpe_output_state(p);
    OverlapEstimator est(joint, MeasurementBudget{});
    for (std::int64_t kc : {3, 18, 45}) {
      const LfParam lf(p.n, 0.2, kc);
      const OverlapEstimate via_histogram =
          qpe_swap_overlap(p, lf, MeasurementBudget{});
      const OverlapEstimate via_state = est.sq_overlap(lf);
      CHECK(std::abs(via_histogram.value - via_state.value) < 1e-10);
    }
  }
  SUBCASE("wide profile washes the register out to 1/N") {
    SpectralProblem wide = two_level_problem();
    wide.a = 2.0;  // broad register profile, nearly flat histogram
    const LfParam lf(wide.n, 0.33, 12);
    const OverlapEstimate e = qpe_swap_overlap(wide, lf, MeasurementBudget{});
    CHECK(std::real(e.value) == doctest::Approx(1.0 / 64.0).epsilon(0.05));
  }
  SUBCASE("centering the probe on an isolated peak maximizes the overlap") {
    SpectralProblem p2;
    p2.n = 6;
    p2.n_s = 1;
    p2.t0 = 1.0;
    p2.a = 0.15;
    p2.eigenvalues = {21.0, 0.0};
    p2.weights = {1.0, 0.0};
    double best = -1.0;
    std::int64_t best_kc = -1;
    for (std::int64_t kc = 0; kc < 64; ++kc) {
      const double h = std::real(
          qpe_swap_overlap(p2, LfParam(p2.n, p2.a, kc), MeasurementBudget{}).value);
      if (h > best) {
        best = h;
        best_kc = kc;
      }
    }
    CHECK(best_kc == 21);
  }
}

TEST_CASE("spectrum fitting") {
  SUBCASE("true centers are a fixed point up to the representation floor") {
    SpectralProblem p;
    p.n = 5;
    p.n_s = 2;
    p.t0 = 1.0;
    p.a = SpectralProblem::a_from_eta(0.3, 5);
    p.eigenvalues = {7.0, 16.0, 24.0};
    p.weights = {0.35, 0.4, 0.25};
    SpectrumFitConfig config;
    config.init.params = {LfParam(5, p.a, 7), LfParam(5, p.a, 16),
                          LfParam(5, p.a, 24)};
    config.init.d = {1.0, 0.0, 0.0};
    // the squared-basis expansion of the register profile is approximate;
    // the threshold sits just above that floor
    config.schedule.threshold = 2e-2;
    config.schedule.max_iters = 200;
    config.seed = 11;
    const FitTrace trace = fit_spectrum(p, config);
    CHECK(trace.converged);
    CHECK(trace.n_iter == 0);  // already below threshold at the start
    CHECK(trace.final_model.params[0].k_c == 7);
    CHECK(trace.final_model.params[1].k_c == 16);
    CHECK(trace.final_model.params[2].k_c == 24);
  }
  SUBCASE("displaced centers are recovered") {
    SpectralProblem p;
    p.n = 5;
    p.n_s = 2;
    p.t0 = 1.0;
    p.a = SpectralProblem::a_from_eta(0.3, 5);
    p.eigenvalues = {7.0, 16.0, 24.0};
    p.weights = {0.35, 0.4, 0.25};
    const QpeHistogram hist = qpe_exact_histogram(p);
    // floor of the squared-basis representation at the true centers
    SpectrumFitConfig config;
    config.init.params = {LfParam(5, p.a, 5), LfParam(5, p.a, 14),
                          LfParam(5, p.a, 26)};
    config.init.d = {1.0, 0.0, 0.0};
    config.schedule.threshold = 2e-2;
    config.schedule.max_iters = 1500;
    config.seed = 12;
    const FitTrace trace = fit_spectrum(p, config);
    CHECK(trace.converged);
    CHECK(trace.final_model.params[0].k_c == 7);
    CHECK(trace.final_model.params[1].k_c == 16);
    CHECK(trace.final_model.params[2].k_c == 24);
  }
}

TEST_CASE("spectrum files") {
  const char* path = "test_spectrum.tmp";
  {
    std::ofstream out(path);
    out << "# test spectrum\n";
    out << "n = 6\n";
    out << "ns = 2\n";
    out << "t0 = 1.0\n";
    out << "eta = 2.0\n";
    out << "17.3 0.4\n";
    out << "43.9 0.6\n";
  }
  const SpectralProblem p = parse_spectrum_file(path);
  CHECK(p.n == 6);
  CHECK(p.n_s == 2);
  CHECK(p.eigenvalues.size() == 2);
  CHECK(p.a == doctest::Approx(SpectralProblem::a_from_eta(2.0, 6)));
  CHECK(p.eta() == doctest::Approx(2.0));

  {
    std::ofstream out(path);
    out << "n = 6\nns = 1\nt0 = 1\neta = 2\n17.3 0.4\n43.9 0.3\n";
  }
  CHECK_THROWS_AS(parse_spectrum_file(path), std::invalid_argument);
  {
    std::ofstream out(path);
    out << "n = 6\nns = 1\nbogus_key = 2\n";
  }
  CHECK_THROWS_AS(parse_spectrum_file(path), config_error);
  std::remove(path);
}
