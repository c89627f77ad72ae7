// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "lfr/estimator.hpp"
#include "lfr/experiment.hpp"
#include "lfr/fit.hpp"
#include "lfr/qpe.hpp"
#include "lfr/simulator.hpp"

namespace {

void BM_LfStateVector(benchmark::State& state) {
  const lfr::LfParam param(int(state.range(0)), 0.49, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfr::lf_state_vector(param));
  }
}
BENCHMARK(BM_LfStateVector)->Arg(5)->Arg(8)->Arg(10);

void BM_PrepareShiftedLf(benchmark::State& state) {
  const lfr::LfParam param(int(state.range(0)), 0.49, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfr::prepare_shifted_lf(param));
  }
}
BENCHMARK(BM_PrepareShiftedLf)->Arg(5)->Arg(8)->Arg(10);

void BM_SwapTest(benchmark::State& state) {
  const int n = int(state.range(0));
  const lfr::StateVector target = lfr::psi_ideal_target(n);
  const lfr::StateVector doubled = lfr::build_doubled_target(target);
  const lfr::StateVector lf = lfr::prepare_shifted_lf(lfr::LfParam(n, 0.49, 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfr::swap_test(lf, doubled));
  }
}
BENCHMARK(BM_SwapTest)->Arg(3)->Arg(5);

void BM_FidelitySolve(benchmark::State& state) {
  const lfr::StateVector target = lfr::psi_ideal_target(5);
  const std::vector<lfr::LfParam> params{
      {5, 0.360, 8}, {5, 1.672, 14}, {5, 0.490, 16}};
  lfr::OverlapEstimator est(target, lfr::MeasurementBudget{});
  Eigen::VectorXcd b(3);
  for (int i = 0; i < 3; ++i) b(i) = est.complex_overlap(params[i]).value;
  const Eigen::MatrixXd S = lfr::lf_overlap_matrix(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfr::solve_coefficients_fidelity(b, S));
  }
}
BENCHMARK(BM_FidelitySolve);

void BM_QpeExactHistogram(benchmark::State& state) {
  lfr::SpectralProblem problem;
  problem.n = int(state.range(0));
  problem.n_s = 2;
  problem.a = 20.0 / double(problem.bins());
  problem.eigenvalues = {0.2 * double(problem.bins()), 0.7 * double(problem.bins())};
  problem.weights = {0.5, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfr::qpe_exact_histogram(problem));
  }
}
BENCHMARK(BM_QpeExactHistogram)->Arg(7)->Arg(9);

void BM_MetropolisAmplitudeFit(benchmark::State& state) {
  lfr::AmplitudeFitProblem prob;
  std::vector<lfr::cdouble> amps(32, 0.0);
  const std::vector<lfr::LfParam> truth{{5, 0.3, 5}, {5, 0.3, 16}, {5, 0.3, 26}};
  const std::vector<double> weights{0.35, 0.4, 0.25};
  std::vector<double> y(32, 0.0);
  for (int l = 0; l < 3; ++l) {
    const auto ysq = lfr::lf_sq_vector(truth[l]);
    for (int k = 0; k < 32; ++k) y[k] += weights[l] * ysq[k];
  }
  for (int k = 0; k < 32; ++k) amps[k] = std::sqrt(y[k]);
  prob.target = lfr::StateVector::from_amplitudes(5, amps);
  prob.init.params = {{5, 0.3, 4}, {5, 0.3, 15}, {5, 0.3, 27}};
  prob.init.d = {1.0, 0.0, 0.0};
  prob.schedule.threshold = 1e-8;
  prob.schedule.max_iters = 300;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    prob.seed = seed++;
    benchmark::DoNotOptimize(lfr::fit_amplitude(prob));
  }
}
BENCHMARK(BM_MetropolisAmplitudeFit);

}  // namespace

BENCHMARK_MAIN();
