// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lfr/rng.hpp"

namespace lfr {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using i64 = std::int64_t;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (trim(s.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw config_error("bad numeric value for '" + key + "': " + s);
}

i64 parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const i64 v = std::stoll(s, &pos);
    if (trim(s.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw config_error("bad integer value for '" + key + "': " + s);
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw config_error("bad boolean value for '" + key + "': " + s);
}

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ',')) {
    const std::string t = trim(tok);
    if (!t.empty()) out.push_back(parse_double(t, key));
  }
  return out;
}

std::vector<i64> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<i64> out;
  for (const std::string& tok : split(s, ',')) {
    const std::string t = trim(tok);
    if (!t.empty()) out.push_back(parse_int(t, key));
  }
  return out;
}

std::string mode_name(EstimationMode mode) {
  switch (mode) {
    case EstimationMode::Exact: return "exact";
    case EstimationMode::Shots: return "shots";
    case EstimationMode::AaEnhanced: return "aa";
  }
  return "exact";
}

EstimationMode mode_from_string(const std::string& s) {
  if (s == "exact") return EstimationMode::Exact;
  if (s == "shots") return EstimationMode::Shots;
  if (s == "aa") return EstimationMode::AaEnhanced;
  throw config_error("unknown mode '" + s + "' (expected exact|shots|aa)");
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats st;
  if (xs.empty()) return st;
  for (double x : xs) st.mean += x;
  st.mean /= double(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - st.mean) * (x - st.mean);
  st.stddev = std::sqrt(var / double(xs.size()));
  return st;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw io_error("write failed: " + path.string());
}

std::string resolve_path(const ExperimentConfig& config, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute() || config.base_dir.empty()) return p;
  return (fs::path(config.base_dir) / path).string();
}

StateVector load_target_state(const ExperimentConfig& config, int n) {
  if (config.target == "psi_ideal") return psi_ideal_target(n);
  if (config.target.rfind("file:", 0) == 0) {
    return load_amplitude_file(resolve_path(config, config.target.substr(5)), n);
  }
  throw config_error("unsupported target '" + config.target + "' for this kind");
}

// ---------------------------------------------------------------------------
// campaign bookkeeping

struct TrialResult {
  int group = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;        // as optimized (possibly shot-noisy)
  double objective_exact = 0.0;  // re-scored against the exact target
  bool converged = false;
  long m_iter = 0;
  long n_iter = 0;
  std::vector<double> a;
  std::vector<i64> kc;
  std::vector<cdouble> d;
  double wall_ms = 0.0;
  FitTrace trace;
};

struct ScalingResult {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double lclf_infidelity = 0.0;
  double direct_infidelity = 0.0;
  double wall_ms = 0.0;
};

std::string results_csv_fit(const ExperimentConfig& config,
                            const std::vector<TrialResult>& rows,
                            const std::string& hash) {
  std::ostringstream out;
  out << "# config_hash " << hash << "\n";
  const int L = config.n_loc();
  out << "init,trial,seed,objective,objective_exact,converged,m_iter,n_iter";
  for (int l = 0; l < L; ++l) out << ",a" << l;
  for (int l = 0; l < L; ++l) out << ",kc" << l;
  for (int l = 0; l < L; ++l) out << ",d" << l << "_re,d" << l << "_im";
  out << "\n";
  for (const TrialResult& r : rows) {
    out << r.group << ',' << r.trial << ',' << r.seed << ',' << fmt(r.objective)
        << ',' << fmt(r.objective_exact) << ',' << (r.converged ? 1 : 0) << ','
        << r.m_iter << ',' << r.n_iter;
    for (double a : r.a) out << ',' << fmt(a);
    for (i64 k : r.kc) out << ',' << k;
    for (const cdouble& d : r.d) out << ',' << fmt(d.real()) << ',' << fmt(d.imag());
    out << "\n";
  }
  return out.str();
}

std::string trace_csv(const FitTrace& trace) {
  std::ostringstream out;
  out << "iter,objective,accepted,m_iter";
  if (!trace.records.empty()) {
    for (std::size_t l = 0; l < trace.records.front().k_c.size(); ++l) {
      out << ",kc" << l;
    }
  }
  out << "\n";
  for (const TraceRecord& rec : trace.records) {
    out << rec.iteration << ',' << fmt(rec.objective) << ','
        << (rec.accepted ? 1 : 0) << ',' << rec.m_iter;
    for (i64 k : rec.k_c) out << ',' << k;
    out << "\n";
  }
  return out.str();
}

double exact_state_infidelity(const StateVector& target,
                              const std::vector<LfParam>& params,
                              const std::vector<cdouble>& d) {
  std::vector<cdouble> model(static_cast<std::size_t>(target.size()), 0.0);
  for (std::size_t l = 0; l < params.size(); ++l) {
    const std::vector<double> lf = lf_state_vector(params[l]);
    for (std::size_t k = 0; k < model.size(); ++k) model[k] += d[l] * lf[k];
  }
  cdouble ip = 0.0;
  double nrm2 = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    ip += std::conj(target.amps[k]) * model[k];
    nrm2 += std::norm(model[k]);
  }
  if (nrm2 == 0.0) return 1.0;
  return 1.0 - std::norm(ip) / nrm2;
}

double exact_residual_sq(const std::vector<double>& y_target,
                         const std::vector<LfParam>& params,
                         const std::vector<cdouble>& d) {
  std::vector<double> model(y_target.size(), 0.0);
  for (std::size_t l = 0; l < params.size(); ++l) {
    const std::vector<double> ysq = lf_sq_vector(params[l]);
    for (std::size_t k = 0; k < model.size(); ++k) {
      model[k] += std::real(d[l]) * ysq[k];
    }
  }
  double r2 = 0.0;
  for (std::size_t k = 0; k < y_target.size(); ++k) {
    const double diff = y_target[k] - model[k];
    r2 += diff * diff;
  }
  return r2;
}

json group_summary_fit(const ExperimentConfig& config, int group,
                       const std::vector<TrialResult>& rows) {
  std::vector<double> obj, obj_exact, miter, niter, hamming;
  int converged = 0;
  for (const TrialResult& r : rows) {
    if (r.group != group) continue;
    obj.push_back(r.objective);
    obj_exact.push_back(r.objective_exact);
    miter.push_back(double(r.m_iter));
    niter.push_back(double(r.n_iter));
    hamming.push_back(double(l1_distance(config.kc_inits[group], r.kc)));
    converged += r.converged ? 1 : 0;
  }
  const Stats so = stats_of(obj), se = stats_of(obj_exact), sm = stats_of(miter),
              sn = stats_of(niter), sh = stats_of(hamming);
  json g;
  g["key"] = group;
  g["kc_init"] = config.kc_inits[group];
  g["trials"] = obj.size();
  g["converged"] = converged;
  g["hamming_mean"] = sh.mean;
  g["hamming_std"] = sh.stddev;
  g["objective_mean"] = so.mean;
  g["objective_std"] = so.stddev;
  g["objective_exact_mean"] = se.mean;
  g["objective_exact_std"] = se.stddev;
  g["m_iter_mean"] = sm.mean;
  g["m_iter_std"] = sm.stddev;
  g["n_iter_mean"] = sn.mean;
  g["n_iter_std"] = sn.stddev;
  return g;
}

void write_fit_outputs(const ExperimentConfig& config,
                       const std::vector<TrialResult>& rows,
                       const json& extra) {
  const std::string hash = config_hash(config);
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  json summary;
  summary["config_hash"] = hash;
  summary["kind"] = to_string(config.kind);
  summary["swept"] = "init";
  summary["threshold"] = config.schedule.threshold;
  summary["groups"] = json::array();
  for (std::size_t g = 0; g < config.kc_inits.size(); ++g) {
    summary["groups"].push_back(group_summary_fit(config, int(g), rows));
  }
  for (const auto& [k, v] : extra.items()) summary[k] = v;

  std::ostringstream timings;
  timings << "group,trial,wall_ms\n";
  for (const TrialResult& r : rows) {
    timings << r.group << ',' << r.trial << ',' << fmt(r.wall_ms) << "\n";
  }

  write_file(dir / "results.csv", results_csv_fit(config, rows, hash));
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_file(dir / "config.resolved", resolved_config_text(config));
  write_file(dir / "timings.csv", timings.str());
  for (const TrialResult& r : rows) {
    std::ostringstream name;
    name << "trace_init" << r.group << "_trial" << r.trial << ".csv";
    write_file(dir / name.str(), trace_csv(r.trace));
  }
}

LclfModel make_init_model(const ExperimentConfig& config, int n, int group) {
  LclfModel model;
  for (std::size_t l = 0; l < config.a_init.size(); ++l) {
    model.params.emplace_back(n, config.a_init[l], config.kc_inits[group][l]);
    model.d.push_back(l == 0 ? 1.0 : 0.0);
  }
  return model;
}

void run_state_or_amplitude(const ExperimentConfig& config) {
  const StateVector target = load_target_state(config, config.n);
  std::vector<double> y_target(static_cast<std::size_t>(target.size()));
  for (i64 k = 0; k < target.size(); ++k) {
    y_target[static_cast<std::size_t>(k)] = std::norm(target.amps[k]);
  }

  std::vector<TrialResult> rows;
  for (std::size_t g = 0; g < config.kc_inits.size(); ++g) {
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t trial_seed =
          hash_mix(config.seed, (std::uint64_t(g) << 20) ^ std::uint64_t(trial));
      const auto t0 = std::chrono::steady_clock::now();

      FitTrace trace;
      if (config.kind == ExperimentKind::StateReadout) {
        FidelityFitProblem prob;
        prob.target = target;
        prob.budget = config.budget;
        prob.budget.seed = trial_seed;
        prob.init = make_init_model(config, config.n, int(g));
        prob.schedule = config.schedule;
        prob.optimize_a = config.optimize_a;
        prob.fd_step = config.fd_step;
        prob.seed = hash_mix(trial_seed, 0xF17);
        trace = fit_state(prob);
      } else {
        AmplitudeFitProblem prob;
        prob.target = target;
        prob.budget = config.budget;
        prob.budget.seed = trial_seed;
        prob.init = make_init_model(config, config.n, int(g));
        prob.schedule = config.schedule;
        prob.optimize_a = config.optimize_a;
        prob.fd_step = config.fd_step;
        prob.seed = hash_mix(trial_seed, 0xF17);
        trace = fit_amplitude(prob);
      }
      const auto t1 = std::chrono::steady_clock::now();

      TrialResult r;
      r.group = int(g);
      r.trial = trial;
      r.seed = trial_seed;
      r.objective = trace.final_objective;
      r.objective_exact =
          config.kind == ExperimentKind::StateReadout
              ? exact_state_infidelity(target, trace.final_model.params,
                                       trace.final_model.d)
              : exact_residual_sq(y_target, trace.final_model.params,
                                  trace.final_model.d);
      r.converged = trace.converged;
      r.m_iter = trace.m_iter;
      r.n_iter = trace.n_iter;
      for (const LfParam& p : trace.final_model.params) {
        r.a.push_back(p.a);
        r.kc.push_back(p.k_c);
      }
      r.d = trace.final_model.d;
      r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      r.trace = std::move(trace);
      rows.push_back(std::move(r));
      std::cerr << "group " << g << " trial " << trial << ": objective "
                << rows.back().objective << ", m_iter " << rows.back().m_iter
                << "\n";
    }
  }
  write_fit_outputs(config, rows, json::object());
}

void run_qpe_spectrum(const ExperimentConfig& config) {
  if (config.target.rfind("spectrum:", 0) != 0) {
    throw config_error("qpe-spectrum needs target = spectrum:<path>");
  }
  const SpectralProblem problem =
      parse_spectrum_file(resolve_path(config, config.target.substr(9)));
  const QpeHistogram hist = qpe_exact_histogram(problem);

  std::vector<TrialResult> rows;
  for (std::size_t g = 0; g < config.kc_inits.size(); ++g) {
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t trial_seed =
          hash_mix(config.seed, (std::uint64_t(g) << 20) ^ std::uint64_t(trial));
      const auto t0 = std::chrono::steady_clock::now();

      SpectrumFitConfig fit_config;
      fit_config.init = make_init_model(config, problem.n, int(g));
      fit_config.schedule = config.schedule;
      fit_config.budget = config.budget;
      fit_config.budget.seed = trial_seed;
      fit_config.optimize_a = config.optimize_a;
      fit_config.fd_step = config.fd_step;
      fit_config.seed = hash_mix(trial_seed, 0xF17);
      FitTrace trace = fit_spectrum(problem, fit_config);
      const auto t1 = std::chrono::steady_clock::now();

      TrialResult r;
      r.group = int(g);
      r.trial = trial;
      r.seed = trial_seed;
      r.objective = trace.final_objective;
      r.objective_exact = exact_residual_sq(hist.probabilities,
                                            trace.final_model.params,
                                            trace.final_model.d);
      r.converged = trace.converged;
      r.m_iter = trace.m_iter;
      r.n_iter = trace.n_iter;
      for (const LfParam& p : trace.final_model.params) {
        r.a.push_back(p.a);
        r.kc.push_back(p.k_c);
      }
      r.d = trace.final_model.d;
      r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      r.trace = std::move(trace);
      rows.push_back(std::move(r));
      std::cerr << "group " << g << " trial " << trial << ": residual "
                << rows.back().objective << ", m_iter " << rows.back().m_iter
                << "\n";
    }
  }

  std::ostringstream spectrum;
  spectrum << "# k probability\n";
  for (std::size_t k = 0; k < hist.probabilities.size(); ++k) {
    spectrum << k << ' ' << fmt(hist.probabilities[k]) << "\n";
  }
  json extra;
  extra["spectrum_bins"] = hist.probabilities.size();
  extra["eta"] = problem.eta();
  write_fit_outputs(config, rows, extra);
  write_file(fs::path(config.out_dir) / "spectrum.dat", spectrum.str());
}

double direct_measurement_infidelity(const StateVector& target, long shots,
                                     Rng& rng) {
  const std::size_t N = target.amps.size();
  std::vector<double> cdf(N);
  double acc = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    acc += std::norm(target.amps[k]);
    cdf[k] = acc;
  }
  std::vector<long> counts(N, 0);
  for (long s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    const std::size_t k =
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    ++counts[std::min(k, N - 1)];
  }
  // amplitudes reconstructed as sqrt of observed frequencies (target known
  // to be real nonnegative)
  double ip = 0.0, nrm2 = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double amp = std::sqrt(double(counts[k]) / double(shots));
    ip += std::abs(target.amps[k]) * amp;
    nrm2 += amp * amp;
  }
  if (nrm2 == 0.0) return 1.0;
  return 1.0 - ip * ip / nrm2;
}

void run_scaling_bench(const ExperimentConfig& config) {
  std::vector<ScalingResult> rows;
  const int L = config.n_loc();
  for (int n = config.n_min; n <= config.n_max; ++n) {
    const StateVector target = psi_ideal_target(n);
    const i64 N = i64{1} << n;
    std::vector<LfParam> params;
    for (int l = 0; l < L; ++l) {
      params.emplace_back(n, config.a_init[l],
                          i64(std::llround(config.kc_fracs[l] * double(N))));
    }
    const Eigen::MatrixXd S = lf_overlap_matrix(params);

    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t trial_seed =
          hash_mix(config.seed, (std::uint64_t(n) << 24) ^ std::uint64_t(trial));
      const auto t0 = std::chrono::steady_clock::now();

      MeasurementBudget budget = config.budget;
      budget.seed = trial_seed;
      OverlapEstimator estimator(target, budget);
      Eigen::VectorXcd b(L);
      for (int l = 0; l < L; ++l) {
        b(l) = estimator.complex_overlap(params[l]).value;
      }
      const FidelitySolution sol = solve_coefficients_fidelity(b, S);
      std::vector<cdouble> d(sol.d.data(), sol.d.data() + sol.d.size());

      ScalingResult r;
      r.n = n;
      r.trial = trial;
      r.seed = trial_seed;
      r.lclf_infidelity = exact_state_infidelity(target, params, d);
      Rng direct_rng(hash_mix(trial_seed, 0xD12EC7));
      r.direct_infidelity =
          direct_measurement_infidelity(target, config.budget.shots, direct_rng);
      const auto t1 = std::chrono::steady_clock::now();
      r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      rows.push_back(r);
      std::cerr << "n " << n << " trial " << trial << ": lclf "
                << r.lclf_infidelity << ", direct " << r.direct_infidelity
                << "\n";
    }
  }

  const std::string hash = config_hash(config);
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  std::ostringstream csv;
  csv << "# config_hash " << hash << "\n";
  csv << "n,trial,seed,lclf_infidelity,direct_infidelity\n";
  std::ostringstream timings;
  timings << "group,trial,wall_ms\n";
  for (const ScalingResult& r : rows) {
    csv << r.n << ',' << r.trial << ',' << r.seed << ','
        << fmt(r.lclf_infidelity) << ',' << fmt(r.direct_infidelity) << "\n";
    timings << r.n << ',' << r.trial << ',' << fmt(r.wall_ms) << "\n";
  }

  json summary;
  summary["config_hash"] = hash;
  summary["kind"] = to_string(config.kind);
  summary["swept"] = "n";
  summary["shots"] = config.budget.shots;
  summary["groups"] = json::array();
  for (int n = config.n_min; n <= config.n_max; ++n) {
    std::vector<double> lclf, direct;
    for (const ScalingResult& r : rows) {
      if (r.n != n) continue;
      lclf.push_back(r.lclf_infidelity);
      direct.push_back(r.direct_infidelity);
    }
    const Stats sl = stats_of(lclf), sd = stats_of(direct);
    json g;
    g["key"] = n;
    g["trials"] = lclf.size();
    g["lclf_mean"] = sl.mean;
    g["lclf_std"] = sl.stddev;
    g["direct_mean"] = sd.mean;
    g["direct_std"] = sd.stddev;
    g["reference"] = 0.15 * std::ldexp(1.0, n) / double(config.budget.shots);
    summary["groups"].push_back(g);
  }

  write_file(dir / "results.csv", csv.str());
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_file(dir / "config.resolved", resolved_config_text(config));
  write_file(dir / "timings.csv", timings.str());
}

// ---------------------------------------------------------------------------
// plot data

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

void emit_convergence_curves(const fs::path& dir, const json& summary) {
  const std::size_t n_groups = summary["groups"].size();
  for (std::size_t g = 0; g < n_groups; ++g) {
    // collect per-iteration objective across trials; shorter traces hold
    // their last value
    std::vector<std::vector<double>> curves;
    for (int trial = 0;; ++trial) {
      std::ostringstream name;
      name << "trace_init" << g << "_trial" << trial << ".csv";
      const fs::path p = dir / name.str();
      if (!fs::exists(p)) break;
      std::vector<double> curve;
      for (const auto& row : read_csv(p)) {
        if (row.size() < 2 || row[0] == "iter") continue;
        curve.push_back(std::stod(row[1]));
      }
      curves.push_back(std::move(curve));
    }
    if (curves.empty()) continue;
    std::size_t len = 0;
    for (const auto& c : curves) len = std::max(len, c.size());
    std::ostringstream out;
    out << "# iter objective_mean objective_std\n";
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<double> vals;
      for (const auto& c : curves) {
        vals.push_back(i < c.size() ? c[i] : c.back());
      }
      const Stats st = stats_of(vals);
      out << i << ' ' << fmt(st.mean) << ' ' << fmt(st.stddev) << "\n";
    }
    std::ostringstream name;
    name << "convergence_init" << g << ".dat";
    write_file(dir / name.str(), out.str());
  }
}

void emit_fit_plotdata(const fs::path& dir, const json& summary) {
  struct Row {
    double hamming;
    double m_mean;
    double m_std;
  };
  std::vector<Row> rows;
  for (const auto& g : summary["groups"]) {
    rows.push_back({g["hamming_mean"].get<double>(), g["m_iter_mean"].get<double>(),
                    g["m_iter_std"].get<double>()});
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.hamming < b.hamming; });
  std::ostringstream out;
  out << "# hamming_distance mean_m_iter std_m_iter\n";
  for (const Row& r : rows) {
    out << fmt(r.hamming) << ' ' << fmt(r.m_mean) << ' ' << fmt(r.m_std) << "\n";
  }
  write_file(dir / "miter_vs_hamming.dat", out.str());
  emit_convergence_curves(dir, summary);
}

void emit_scaling_plotdata(const fs::path& dir, const json& summary) {
  std::ostringstream out;
  out << "# n lclf_mean lclf_std direct_mean direct_std reference\n";
  for (const auto& g : summary["groups"]) {
    out << g["key"].get<int>() << ' ' << fmt(g["lclf_mean"].get<double>()) << ' '
        << fmt(g["lclf_std"].get<double>()) << ' '
        << fmt(g["direct_mean"].get<double>()) << ' '
        << fmt(g["direct_std"].get<double>()) << ' '
        << fmt(g["reference"].get<double>()) << "\n";
  }
  write_file(dir / "infidelity_vs_n.dat", out.str());
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::StateReadout: return "state-readout";
    case ExperimentKind::AmplitudeReadout: return "amplitude-readout";
    case ExperimentKind::QpeSpectrum: return "qpe-spectrum";
    case ExperimentKind::ScalingBench: return "scaling-bench";
  }
  return "state-readout";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "state-readout") return ExperimentKind::StateReadout;
  if (name == "amplitude-readout") return ExperimentKind::AmplitudeReadout;
  if (name == "qpe-spectrum") return ExperimentKind::QpeSpectrum;
  if (name == "scaling-bench") return ExperimentKind::ScalingBench;
  throw config_error("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  ExperimentConfig config;
  config.a_init.clear();
  config.base_dir = fs::path(path).parent_path().string();

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw config_error("expected key = value at line " + std::to_string(lineno));
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));

    if (key == "kind") {
      config.kind = experiment_kind_from_string(value);
    } else if (key == "n") {
      config.n = int(parse_int(value, key));
    } else if (key == "target") {
      config.target = value;
    } else if (key == "a_init") {
      config.a_init = parse_double_list(value, key);
    } else if (key == "kc_init") {
      config.kc_inits.clear();
      for (const std::string& part : split(value, ';')) {
        if (!trim(part).empty()) {
          config.kc_inits.push_back(parse_int_list(part, key));
        }
      }
    } else if (key == "kc_frac") {
      config.kc_fracs = parse_double_list(value, key);
    } else if (key == "mode") {
      config.budget.mode = mode_from_string(value);
    } else if (key == "shots") {
      config.budget.shots = long(parse_int(value, key));
    } else if (key == "shots_per_setting") {
      config.budget.shots_per_setting = parse_bool(value, key);
    } else if (key == "aa_bits") {
      config.budget.aa_bits = int(parse_int(value, key));
    } else if (key == "aa_reps") {
      config.budget.aa_repetitions = int(parse_int(value, key));
    } else if (key == "beta0") {
      config.schedule.beta0 = parse_double(value, key);
    } else if (key == "alpha0") {
      config.schedule.alpha0 = parse_double(value, key);
    } else if (key == "alpha1") {
      config.schedule.alpha1 = parse_double(value, key);
    } else if (key == "max_iters") {
      config.schedule.max_iters = int(parse_int(value, key));
    } else if (key == "threshold") {
      config.schedule.threshold = parse_double(value, key);
    } else if (key == "steps_per_sweep") {
      config.schedule.steps_per_sweep = int(parse_int(value, key));
    } else if (key == "optimize_a") {
      config.optimize_a = parse_bool(value, key);
    } else if (key == "fd_step") {
      config.fd_step = parse_double(value, key);
    } else if (key == "trials") {
      config.trials = int(parse_int(value, key));
    } else if (key == "seed") {
      config.seed = std::uint64_t(parse_int(value, key));
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "n_min") {
      config.n_min = int(parse_int(value, key));
    } else if (key == "n_max") {
      config.n_max = int(parse_int(value, key));
    } else {
      throw config_error("unknown config key '" + key + "' at line " +
                         std::to_string(lineno));
    }
  }
  return config;
}

void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw config_error("trials must be >= 1");
  if (config.a_init.empty()) throw config_error("a_init must not be empty");
  for (double a : config.a_init) {
    if (!(a >= kMinDecayRate)) throw config_error("a_init entries must be positive");
  }
  if (config.kind == ExperimentKind::ScalingBench) {
    if (config.kc_fracs.size() != config.a_init.size()) {
      throw config_error("kc_frac must match a_init in length");
    }
    if (config.n_min < 1 || config.n_max < config.n_min ||
        config.n_max > kMaxQubits) {
      throw config_error("bad scaling range [n_min, n_max]");
    }
    if (config.budget.mode != EstimationMode::Shots) {
      throw config_error("scaling-bench requires mode = shots");
    }
    if (config.budget.shots < 1) throw config_error("shots must be >= 1");
    return;
  }
  if (config.kc_inits.empty()) throw config_error("kc_init must not be empty");
  for (const auto& kc : config.kc_inits) {
    if (kc.size() != config.a_init.size()) {
      throw config_error("every kc_init entry must match a_init in length");
    }
  }
  if (config.n < 1 || config.n > kMaxQubits) throw config_error("bad n");
  if (config.schedule.max_iters < 0) throw config_error("bad max_iters");
  if (!(config.schedule.threshold > 0.0 && config.schedule.threshold < 1.0)) {
    throw config_error("threshold must be in (0, 1)");
  }
  if (config.budget.mode == EstimationMode::Shots && config.budget.shots < 1) {
    throw config_error("shots must be >= 1");
  }
  if (config.budget.mode == EstimationMode::AaEnhanced &&
      (config.budget.aa_bits < 1 || config.budget.aa_repetitions < 1)) {
    throw config_error("aa_bits and aa_reps must be >= 1");
  }
  if (config.kind == ExperimentKind::QpeSpectrum &&
      config.target.rfind("spectrum:", 0) != 0) {
    throw config_error("qpe-spectrum needs target = spectrum:<path>");
  }
}

std::string resolved_config_text(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "kind = " << to_string(config.kind) << "\n";
  out << "n = " << config.n << "\n";
  out << "target = " << config.target << "\n";
  out << "a_init = ";
  for (std::size_t i = 0; i < config.a_init.size(); ++i) {
    out << (i ? "," : "") << fmt(config.a_init[i]);
  }
  out << "\n";
  out << "kc_init = ";
  for (std::size_t g = 0; g < config.kc_inits.size(); ++g) {
    if (g) out << " ; ";
    for (std::size_t i = 0; i < config.kc_inits[g].size(); ++i) {
      out << (i ? "," : "") << config.kc_inits[g][i];
    }
  }
  out << "\n";
  out << "kc_frac = ";
  for (std::size_t i = 0; i < config.kc_fracs.size(); ++i) {
    out << (i ? "," : "") << fmt(config.kc_fracs[i]);
  }
  out << "\n";
  out << "mode = " << mode_name(config.budget.mode) << "\n";
  out << "shots = " << config.budget.shots << "\n";
  out << "shots_per_setting = " << (config.budget.shots_per_setting ? "true" : "false")
      << "\n";
  out << "aa_bits = " << config.budget.aa_bits << "\n";
  out << "aa_reps = " << config.budget.aa_repetitions << "\n";
  out << "beta0 = " << fmt(config.schedule.beta0) << "\n";
  out << "alpha0 = " << fmt(config.schedule.alpha0) << "\n";
  out << "alpha1 = " << fmt(config.schedule.alpha1) << "\n";
  out << "max_iters = " << config.schedule.max_iters << "\n";
  out << "threshold = " << fmt(config.schedule.threshold) << "\n";
  out << "steps_per_sweep = " << config.schedule.steps_per_sweep << "\n";
  out << "optimize_a = " << (config.optimize_a ? "true" : "false") << "\n";
  out << "fd_step = " << fmt(config.fd_step) << "\n";
  out << "trials = " << config.trials << "\n";
  out << "seed = " << config.seed << "\n";
  // the output location is not part of the experiment identity
  out << "n_min = " << config.n_min << "\n";
  out << "n_max = " << config.n_max << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = resolved_config_text(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StateVector psi_ideal_target(int n) {
  const i64 N = i64{1} << n;
  std::vector<cdouble> amps(static_cast<std::size_t>(N));
  double nrm2 = 0.0;
  for (i64 j = 0; j < N; ++j) {
    const double x = double(j) / double(N);
    const double g1 = std::exp(-std::pow(32.0 * (x - 0.5) / 3.0, 2.0));
    const double g2 = 0.4 * std::exp(-std::pow(16.0 * (x - 0.25), 2.0));
    amps[static_cast<std::size_t>(j)] = g1 + g2;
    nrm2 += (g1 + g2) * (g1 + g2);
  }
  const double nrm = std::sqrt(nrm2);
  for (cdouble& a : amps) a /= nrm;
  return StateVector::from_amplitudes(n, std::move(amps));
}

StateVector load_amplitude_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open amplitude file: " + path);
  std::vector<cdouble> amps;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream pair_in(t);
    double re = 0.0, im = 0.0;
    if (!(pair_in >> re >> im)) {
      throw config_error("expected 're im' in amplitude file: " + t);
    }
    amps.emplace_back(re, im);
  }
  if (amps.size() != (std::size_t{1} << n)) {
    throw config_error("amplitude file has " + std::to_string(amps.size()) +
                       " entries, expected 2^" + std::to_string(n));
  }
  double nrm2 = 0.0;
  for (const cdouble& a : amps) nrm2 += std::norm(a);
  const double nrm = std::sqrt(nrm2);
  if (std::abs(nrm - 1.0) > 1e-6) {
    std::cerr << "warning: amplitude file norm " << nrm
              << " differs from 1 by more than 1e-6; normalizing\n";
  }
  for (cdouble& a : amps) a /= nrm;
  return StateVector::from_amplitudes(n, std::move(amps));
}

std::int64_t l1_distance(const std::vector<std::int64_t>& a,
                         const std::vector<std::int64_t>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("center vectors differ in length");
  }
  i64 d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

void run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  switch (config.kind) {
    case ExperimentKind::StateReadout:
    case ExperimentKind::AmplitudeReadout:
      run_state_or_amplitude(config);
      break;
    case ExperimentKind::QpeSpectrum:
      run_qpe_spectrum(config);
      break;
    case ExperimentKind::ScalingBench:
      run_scaling_bench(config);
      break;
  }
}

void emit_plotdata(const std::string& result_dir) {
  const fs::path dir(result_dir);
  const fs::path summary_path = dir / "summary.json";
  std::ifstream in(summary_path);
  if (!in) throw io_error("missing summary.json in " + result_dir);
  json summary;
  try {
    in >> summary;
  } catch (const std::exception& e) {
    throw io_error("cannot parse " + summary_path.string() + ": " + e.what());
  }
  const std::string kind = summary["kind"].get<std::string>();
  if (kind == "scaling-bench") {
    emit_scaling_plotdata(dir, summary);
  } else {
    emit_fit_plotdata(dir, summary);
  }
}

}  // namespace lfr
