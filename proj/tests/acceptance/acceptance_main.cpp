// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one pass/fail line; the
// exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfr/estimator.hpp"
#include "lfr/experiment.hpp"
#include "lfr/fit.hpp"
#include "lfr/qpe.hpp"
#include "lfr/rng.hpp"
#include "lfr/simulator.hpp"

using namespace lfr;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

StateVector random_state(int n, Rng& rng) {
  std::vector<cdouble> amps(std::size_t{1} << n);
  double nrm2 = 0.0;
  for (cdouble& a : amps) {
    a = cdouble(rng.uniform() - 0.5, rng.uniform() - 0.5);
    nrm2 += std::norm(a);
  }
  for (cdouble& a : amps) a /= std::sqrt(nrm2);
  return StateVector::from_amplitudes(n, std::move(amps));
}

Eigen::VectorXcd exact_b(const StateVector& target,
                         const std::vector<LfParam>& params) {
  Eigen::VectorXcd b(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::vector<double> lf = lf_state_vector(params[i]);
    cdouble v = 0.0;
    for (std::int64_t k = 0; k < target.size(); ++k) {
      v += std::conj(target.amps[k]) * lf[k];
    }
    b(static_cast<Eigen::Index>(i)) = v;
  }
  return b;
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = double(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    dx += (xs[i] - mx) * (xs[i] - mx);
    dy += (ys[i] - my) * (ys[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

// --- criterion 1: reference instance at n = 5 -------------------------------

void criterion_1() {
  const StateVector target = psi_ideal_target(5);
  const std::vector<LfParam> params{
      {5, 0.360, 8}, {5, 1.672, 14}, {5, 0.490, 16}};
  const Eigen::VectorXcd b = exact_b(target, params);
  const FidelitySolution sol =
      solve_coefficients_fidelity(b, lf_overlap_matrix(params));
  int am = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(sol.d(i)) > std::abs(sol.d(am))) am = i;
  }
  const Eigen::VectorXcd d = sol.d * std::polar(1.0, -std::arg(sol.d(am)));
  const double infid = 1.0 - sol.kappa_max;
  const bool d_ok = std::abs(d(0) - cdouble(0.380)) < 0.02 &&
                    std::abs(d(1) - cdouble(-0.517)) < 0.02 &&
                    std::abs(d(2) - cdouble(1.272)) < 0.02;
  const bool infid_ok = std::abs(infid - 7.1e-3) < 1e-3;
  std::ostringstream detail;
  detail << "d = (" << d(0).real() << ", " << d(1).real() << ", " << d(2).real()
         << "), infidelity = " << infid;
  report(1, d_ok && infid_ok, "reference coefficients and infidelity at n = 5",
         detail.str());
}

// --- criterion 2: infidelity scaling with the qubit count -------------------

void criterion_2() {
  ExperimentConfig config;
  config.kind = ExperimentKind::ScalingBench;
  config.target = "psi_ideal";
  config.a_init = {0.360, 1.672, 0.490};
  config.kc_fracs = {0.25, 0.4375, 0.5};
  config.budget.mode = EstimationMode::Shots;
  config.budget.shots = 1000;
  config.trials = 10;
  config.n_min = 4;
  config.n_max = 8;
  config.seed = 814;
  const fs::path out = fs::temp_directory_path() / "lfr_acceptance_scaling";
  fs::remove_all(out);
  config.out_dir = out.string();
  run_experiment(config);

  std::ifstream in(out / "summary.json");
  nlohmann::json summary;
  in >> summary;
  std::vector<double> ns, lclf, log2_direct;
  for (const auto& g : summary["groups"]) {
    ns.push_back(g["key"].get<double>());
    lclf.push_back(g["lclf_mean"].get<double>());
    log2_direct.push_back(std::log2(g["direct_mean"].get<double>()));
  }
  double lo = lclf[0], hi = lclf[0];
  for (double v : lclf) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double slope = lsq_slope(ns, log2_direct);
  const bool flat_ok = hi / lo < 3.0;
  const bool slope_ok = std::abs(slope - 1.0) < 0.2;
  std::ostringstream detail;
  detail << "lclf spread " << hi / lo << "x, direct log2-slope " << slope;
  report(2, flat_ok && slope_ok,
         "readout infidelity flat in n while direct readout doubles per qubit",
         detail.str());
  fs::remove_all(out);
}

// --- criterion 3: evaluation counts vs center displacement ------------------

void criterion_3() {
  const std::vector<std::int64_t> tgt{5, 16, 26};
  const std::vector<double> w{0.35, 0.4, 0.25};
  const double width = 0.3;
  std::vector<double> y(32, 0.0);
  for (int l = 0; l < 3; ++l) {
    const std::vector<double> ysq = lf_sq_vector(LfParam(5, width, tgt[l]));
    for (int k = 0; k < 32; ++k) y[k] += w[l] * ysq[k];
  }
  std::vector<cdouble> amps(32);
  for (int k = 0; k < 32; ++k) amps[k] = std::sqrt(y[k]);
  const StateVector target = StateVector::from_amplitudes(5, amps);

  const std::vector<std::vector<std::int64_t>> inits{
      {4, 15, 27}, {3, 14, 28}, {2, 13, 29}, {1, 12, 30}, {0, 10, 21}};
  std::vector<double> distances, means, stds;
  for (const auto& init : inits) {
    double D = 0.0;
    for (int l = 0; l < 3; ++l) D += double(std::llabs(init[l] - tgt[l]));
    double sum = 0.0, sum2 = 0.0;
    const int trials = 50;
    for (int s = 0; s < trials; ++s) {
      AmplitudeFitProblem prob;
      prob.target = target;
      prob.init.params = {LfParam(5, width, init[0]), LfParam(5, width, init[1]),
                          LfParam(5, width, init[2])};
      prob.init.d = {1.0, 0.0, 0.0};
      prob.schedule.beta0 = 100.0;
      prob.schedule.alpha0 = 1.0;
      prob.schedule.alpha1 = 15.0;
      prob.schedule.max_iters = 8000;
      prob.schedule.threshold = 1e-8;
      prob.seed = 5000 + s;
      const FitTrace trace = fit_amplitude(prob);
      sum += double(trace.m_iter);
      sum2 += double(trace.m_iter) * double(trace.m_iter);
    }
    const double mean = sum / trials;
    distances.push_back(D);
    means.push_back(mean);
    stds.push_back(std::sqrt(sum2 / trials - mean * mean));
  }
  const double r = pearson(distances, means);
  const double worst_mean = means.back();
  const double worst_std = stds.back();
  const bool linear_ok = r > 0.8;
  const bool worst_ok =
      worst_mean <= 32.0 && std::abs(worst_mean - 28.0) <= worst_std;
  std::ostringstream detail;
  detail << "pearson r = " << r << ", worst init mean = " << worst_mean
         << " +- " << worst_std;
  report(3, linear_ok && worst_ok,
         "evaluation count grows linearly with center displacement",
         detail.str());
}

// --- criterion 4: analytic overlaps vs brute force, circuit vs closed form --

void criterion_4() {
  Rng rng(41);
  double worst_overlap = 0.0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = int(rng.uniform_int(4, 8));
    const std::int64_t N = std::int64_t{1} << n;
    const double a = 0.05 + rng.uniform() * 2.5;
    const double ap = 0.05 + rng.uniform() * 2.5;
    const std::int64_t kc = rng.uniform_int(0, N - 1);
    const std::vector<double> u = lf_state_vector(LfParam(n, a, kc));
    const std::vector<double> v = lf_state_vector(LfParam(n, ap, 0));
    double direct = 0.0, direct_sq = 0.0;
    for (std::int64_t k = 0; k < N; ++k) {
      direct += u[k] * v[k];
      direct_sq += u[k] * u[k] * v[k] * v[k];
    }
    worst_overlap =
        std::max(worst_overlap, std::abs(lf_overlap(n, a, ap, kc) - direct));
    worst_overlap = std::max(worst_overlap,
                             std::abs(lf_sq_overlap(n, a, ap, kc) - direct_sq));
  }
  double worst_prep = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = int(rng.uniform_int(1, 8));
    const double a = 0.05 + rng.uniform() * 3.0;
    const LfParam p(n, a, rng.uniform_int(0, (1 << n) - 1));
    const StateVector s = prepare_shifted_lf(p);
    const std::vector<double> ref = lf_state_vector(p);
    cdouble ip = 0.0;
    for (std::int64_t k = 0; k < s.size(); ++k) {
      ip += std::conj(s.amps[k]) * ref[k];
    }
    worst_prep = std::max(worst_prep, 1.0 - std::norm(ip));
  }
  std::ostringstream detail;
  detail << "worst overlap error " << worst_overlap
         << ", worst fidelity deficit " << worst_prep;
  report(4, worst_overlap < 1e-9 && worst_prep < 1e-10,
         "closed-form overlaps and circuit preparation match brute force",
         detail.str());
}

// --- criterion 5: interference/swap probabilities and the eigenvalue identity

void criterion_5() {
  Rng rng(51);
  double worst_prob = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = int(rng.uniform_int(2, 5));
    const StateVector u = random_state(n, rng);
    const StateVector v = random_state(n, rng);
    const cdouble ip = inner_product(u, v);
    for (double phi : {0.0, std::numbers::pi / 2.0}) {
      const double p0 = switch_test(u, v, phi);
      const double expect = (1.0 + std::real(std::polar(1.0, phi) * ip)) / 2.0;
      worst_prob = std::max(worst_prob, std::abs(p0 - expect));
    }
    const LfParam p(n, 0.1 + rng.uniform(), rng.uniform_int(0, (1 << n) - 1));
    const double p0 = swap_test(prepare_shifted_lf(p), build_doubled_target(u));
    const std::vector<double> lsq = lf_sq_vector(p);
    double h = 0.0;
    for (std::int64_t k = 0; k < u.size(); ++k) {
      h += std::norm(u.amps[k]) * lsq[k];
    }
    worst_prob = std::max(worst_prob, std::abs(p0 - (1.0 + h) / 2.0));
  }
  double worst_kappa = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5;
    const std::vector<LfParam> params{
        {n, 0.2 + rng.uniform(), rng.uniform_int(0, 31)},
        {n, 0.2 + rng.uniform(), rng.uniform_int(0, 31)},
        {n, 0.2 + rng.uniform(), rng.uniform_int(0, 31)}};
    if (effectively_equal(params[0], params[1]) ||
        effectively_equal(params[0], params[2]) ||
        effectively_equal(params[1], params[2])) {
      continue;
    }
    const StateVector target = random_state(n, rng);
    const Eigen::VectorXcd b = exact_b(target, params);
    const FidelitySolution sol =
        solve_coefficients_fidelity(b, lf_overlap_matrix(params));
    std::vector<cdouble> psi(32, 0.0);
    for (int l = 0; l < 3; ++l) {
      const std::vector<double> lf = lf_state_vector(params[l]);
      for (int k = 0; k < 32; ++k) psi[k] += sol.d(l) * lf[k];
    }
    cdouble ip = 0.0;
    for (int k = 0; k < 32; ++k) ip += std::conj(target.amps[k]) * psi[k];
    worst_kappa =
        std::max(worst_kappa, std::abs(std::norm(ip) - sol.kappa_max));
  }
  std::ostringstream detail;
  detail << "worst probability error " << worst_prob
         << ", worst eigenvalue-fidelity gap " << worst_kappa;
  report(5, worst_prob < 1e-10 && worst_kappa < 1e-9,
         "ancilla probabilities match the closed forms and the top eigenvalue "
         "equals the achieved fidelity",
         detail.str());
}

// --- criterion 6: measurement-error scaling laws ----------------------------

void criterion_6() {
  Rng rng(25);
  const StateVector target = random_state(4, rng);
  OverlapEstimator exact(target, MeasurementBudget{});
  const LfParam p(4, 0.52, 6);
  const cdouble b_true = exact.complex_overlap(p).value;

  std::vector<double> log_shots, log_rmse;
  for (long shots : {100L, 1000L, 10000L}) {
    double mse = 0.0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
      MeasurementBudget budget;
      budget.mode = EstimationMode::Shots;
      budget.shots = shots;
      budget.seed = 40000 + s;
      OverlapEstimator est(target, budget);
      mse += std::norm(est.complex_overlap(p).value - b_true);
    }
    log_shots.push_back(std::log10(double(shots)));
    log_rmse.push_back(std::log10(std::sqrt(mse / double(seeds))));
  }
  const double shot_slope = lsq_slope(log_shots, log_rmse);

  // fixed generic instance: the phase fraction of its good-state probability
  // stays at least 0.16 grid cells off every tested register grid
  Rng inst(12);
  const StateVector aa_target = random_state(3, inst);
  const LfParam aa_param(3, 0.62, 5);
  std::vector<double> probs(8);
  for (int i = 0; i < 8; ++i) probs[i] = std::norm(aa_target.amps[i]);
  const double p0 = (1.0 + exact_sq_overlap(probs, 3, aa_param)) / 2.0;
  std::vector<double> ts, log2_rmse;
  for (int t = 3; t <= 8; ++t) {
    double mse = 0.0;
    const int seeds = 300;
    for (int s = 0; s < seeds; ++s) {
      const double est = qae_estimate_probability(p0, t, 5, 777000 + s);
      mse += (est - p0) * (est - p0);
    }
    ts.push_back(double(t));
    log2_rmse.push_back(std::log2(std::sqrt(mse / double(seeds))));
  }
  const double aa_slope = lsq_slope(ts, log2_rmse);

  std::ostringstream detail;
  detail << "shot slope " << shot_slope << ", amplification slope " << aa_slope;
  report(6, std::abs(shot_slope + 0.5) < 0.1 && std::abs(aa_slope + 1.0) < 0.15,
         "shot noise scales as 1/sqrt(shots), amplification as 1/2^t",
         detail.str());
}

// --- criterion 7: spectral sampling -----------------------------------------

void criterion_7() {
  double worst_hist = 0.0;
  {
    Rng rng(71);
    for (int trial = 0; trial < 3; ++trial) {
      SpectralProblem p;
      p.n = 6;
      p.n_s = 2;
      p.t0 = 0.5 + rng.uniform();
      p.a = 0.05 + rng.uniform() * 0.5;
      const double w0 = 0.2 + 0.5 * rng.uniform();
      p.eigenvalues = {rng.uniform() * 60.0, rng.uniform() * 60.0};
      p.weights = {w0, 1.0 - w0};
      const QpeHistogram exact = qpe_exact_histogram(p);
      const QpeHistogram circuit = qpe_circuit_histogram(p);
      for (std::size_t k = 0; k < exact.probabilities.size(); ++k) {
        worst_hist =
            std::max(worst_hist, std::abs(exact.probabilities[k] -
                                          circuit.probabilities[k]));
      }
    }
  }

  double worst_rel = 0.0;
  for (const auto& [n, aN] :
       std::vector<std::pair<int, double>>{{9, 20.0}, {10, 25.0}}) {
    SpectralProblem p;
    p.n = n;
    p.n_s = 1;
    p.t0 = 1.0;
    p.a = aN / std::ldexp(1.0, n);
    p.eigenvalues = {0.25 * std::ldexp(1.0, n), 0.661 * std::ldexp(1.0, n)};
    p.weights = {0.5, 0.5};
    const QpeHistogram hist = qpe_exact_histogram(p);
    const std::vector<double> ref = lorentzian_reference(p);
    double peak = 0.0;
    for (double v : hist.probabilities) peak = std::max(peak, v);
    for (std::size_t k = 0; k < hist.probabilities.size(); ++k) {
      if (hist.probabilities[k] >= 0.01 * peak) {
        worst_rel = std::max(worst_rel,
                             std::abs(hist.probabilities[k] - ref[k]) /
                                 hist.probabilities[k]);
      }
    }
  }

  double worst_cancel = 0.0;
  {
    SpectralProblem p;
    p.n = 6;
    p.n_s = 2;
    p.t0 = 1.0;
    p.a = 0.18;
    p.eigenvalues = {17.3, 43.9};
    p.weights = {0.4, 0.6};
    for (std::int64_t kc : {0, 17, 44}) {
      const LfParam lf(p.n, 0.25, kc);
      worst_cancel = std::max(
          worst_cancel, std::abs(qpe_swap_test_probability(p, lf, false) -
                                 qpe_swap_test_probability(p, lf, true)));
    }
  }
  std::ostringstream detail;
  detail << "hist gap " << worst_hist << ", peak-region rel err " << worst_rel
         << ", cancellation gap " << worst_cancel;
  report(7, worst_hist < 1e-9 && worst_rel < 0.05 && worst_cancel < 1e-10,
         "sampling circuit, closed form, reference profile and transform "
         "cancellation agree",
         detail.str());
}

// --- criterion 8: gradient checks -------------------------------------------

void criterion_8() {
  Rng rng(81);
  double worst = 0.0;
  bool pass = true;
  int tested = 0;
  while (tested < 20) {
    const int n = 5;
    const StateVector target = random_state(n, rng);
    const std::vector<LfParam> params{
        {n, 0.3 + rng.uniform(), rng.uniform_int(0, 31)},
        {n, 0.3 + rng.uniform(), rng.uniform_int(0, 31)},
        {n, 0.3 + rng.uniform(), rng.uniform_int(0, 31)}};
    if (effectively_equal(params[0], params[1]) ||
        effectively_equal(params[0], params[2]) ||
        effectively_equal(params[1], params[2])) {
      continue;
    }
    if (tested % 2 == 0) {
      const auto objective = [&](const std::vector<LfParam>& q) {
        return solve_coefficients_fidelity(exact_b(target, q),
                                           lf_overlap_matrix(q))
            .kappa_max;
      };
      const Eigen::VectorXcd b = exact_b(target, params);
      const FidelitySolution sol =
          solve_coefficients_fidelity(b, lf_overlap_matrix(params));
      const auto oracle = [&](const LfParam& q) {
        const std::vector<double> lf = lf_state_vector(q);
        cdouble v = 0.0;
        for (std::int64_t k = 0; k < target.size(); ++k) {
          v += std::conj(target.amps[k]) * lf[k];
        }
        return v;
      };
      const std::vector<double> g =
          fidelity_gradient_a(params, sol.d, sol.kappa_max, b, oracle, 1e-4);
      double gnorm = 0.0;
      for (double v : g) gnorm += v * v;
      gnorm = std::sqrt(gnorm);
      for (int l = 0; l < 3; ++l) {
        std::vector<LfParam> up = params, dn = params;
        up[l] = LfParam(n, params[l].a + 1e-5, params[l].k_c);
        dn[l] = LfParam(n, params[l].a - 1e-5, params[l].k_c);
        const double fd = (objective(up) - objective(dn)) / 2e-5;
        const double err = std::abs(g[l] - fd);
        worst = std::max(worst, err);
        if (err > std::max(1e-6, 1e-3 * gnorm)) pass = false;
      }
    } else {
      std::vector<double> y(32);
      double ytt = 0.0;
      for (std::int64_t k = 0; k < 32; ++k) {
        y[k] = std::norm(target.amps[k]);
        ytt += y[k] * y[k];
      }
      const auto h_oracle = [&](const LfParam& q) {
        return exact_sq_overlap(y, 5, q);
      };
      const auto objective = [&](const std::vector<LfParam>& q) {
        Eigen::VectorXd h(3);
        for (int l = 0; l < 3; ++l) h(l) = h_oracle(q[l]);
        return solve_coefficients_residual(h, lf_sq_overlap_matrix(q), ytt)
            .residual_sq;
      };
      Eigen::VectorXd h(3);
      for (int l = 0; l < 3; ++l) h(l) = h_oracle(params[l]);
      const ResidualSolution sol =
          solve_coefficients_residual(h, lf_sq_overlap_matrix(params), ytt);
      const std::vector<double> g =
          residual_gradient_a(params, sol.d, h_oracle, 1e-4);
      double gnorm = 0.0;
      for (double v : g) gnorm += v * v;
      gnorm = std::sqrt(gnorm);
      for (int l = 0; l < 3; ++l) {
        std::vector<LfParam> up = params, dn = params;
        up[l] = LfParam(n, params[l].a + 1e-5, params[l].k_c);
        dn[l] = LfParam(n, params[l].a - 1e-5, params[l].k_c);
        const double fd = (objective(up) - objective(dn)) / 2e-5;
        const double err = std::abs(g[l] - fd);
        worst = std::max(worst, err);
        if (err > std::max(1e-6, 1e-3 * gnorm)) pass = false;
      }
    }
    ++tested;
  }
  std::ostringstream detail;
  detail << "worst gradient mismatch " << worst << " over " << tested
         << " instances";
  report(8, pass, "assembled decay-rate gradients match finite differences",
         detail.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("summary: %d/8 criteria passed\n", 8 - g_failures);
  return g_failures;
}
