// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "lfr/rng.hpp"

namespace lfr {

namespace {

using i64 = std::int64_t;

constexpr double kEigenvalueFloor = 1e-12;
constexpr double kConditionLimit = 1e12;
constexpr double kInitialLineSearchStep = 0.1;
constexpr int kMaxHalvings = 8;

std::vector<LfParam> with_centers(const std::vector<LfParam>& params,
                                  const std::vector<i64>& kc) {
  std::vector<LfParam> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.emplace_back(params[i].n, params[i].a, kc[i]);
  }
  return out;
}

std::vector<LfParam> with_rates(const std::vector<LfParam>& params,
                                const std::vector<double>& a) {
  std::vector<LfParam> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.emplace_back(params[i].n, a[i], params[i].k_c);
  }
  return out;
}

std::vector<i64> centers_of(const std::vector<LfParam>& params) {
  std::vector<i64> kc(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) kc[i] = params[i].k_c;
  return kc;
}

std::vector<double> rates_of(const std::vector<LfParam>& params) {
  std::vector<double> a(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) a[i] = params[i].a;
  return a;
}

bool proposal_valid(const std::vector<LfParam>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = i + 1; j < params.size(); ++j) {
      if (effectively_equal(params[i], params[j])) return false;
    }
  }
  return true;
}

// Annealed single-component random walk over the centers, resumable so the
// full fit can interleave decay-rate updates while the schedules keep
// advancing with the global step index.
class MetropolisChain {
 public:
  MetropolisChain(LclfModel model, CenterObjective objective,
                  AnnealingSchedule schedule, std::uint64_t seed,
                  std::shared_ptr<CostLedger> ledger)
      : model_(std::move(model)),
        objective_(std::move(objective)),
        schedule_(schedule),
        rng_(seed),
        ledger_(std::move(ledger)) {
    if (!(schedule_.beta0 > 0.0)) {
      throw std::invalid_argument("beta0 must be positive");
    }
    if (schedule_.max_iters < 0) {
      throw std::invalid_argument("max_iters must be nonnegative");
    }
    model_.validate();
    check_params_distinct(model_.params);
    current_ = evaluate(centers_of(model_.params));
    best_ = current_;
    best_params_ = model_.params;
    trace_.records.push_back(record(0, true));
  }

  // Runs up to `steps` proposals; stops early at the threshold or the global
  // cap. Returns true when converged.
  bool run(int steps) {
    for (int s = 0; s < steps && k_ < schedule_.max_iters && !converged();
         ++s) {
      ++k_;
      step_once();
    }
    return converged();
  }

  bool converged() const { return current_.report < schedule_.threshold; }
  long steps_taken() const { return k_; }

  const ObjectiveValue& current() const { return current_; }
  const std::vector<LfParam>& params() const { return model_.params; }

  // Re-anchors the chain after an external decay-rate change. Cached
  // objective values refer to the old rates, so the cache is dropped.
  void reset_rates(const std::vector<double>& a) {
    model_.params = with_rates(model_.params, a);
    config_cache_.clear();
    current_ = evaluate(centers_of(model_.params));
    if (current_.score > best_.score) {
      best_ = current_;
      best_params_ = model_.params;
    }
  }

  FitTrace finish() {
    FitTrace trace = std::move(trace_);
    trace.final_model.params = best_params_;
    trace.final_model.d = best_.d;
    trace.final_objective = best_.report;
    trace.converged = converged();
    trace.n_iter = k_;
    trace.m_iter = ledger_ ? ledger_->m_iter() : 0;
    return trace;
  }

 private:
  ObjectiveValue evaluate(const std::vector<i64>& kc) {
    const auto it = config_cache_.find(kc);
    if (it != config_cache_.end()) return it->second;
    const ObjectiveValue value = objective_(with_centers(model_.params, kc));
    config_cache_.emplace(kc, value);
    return value;
  }

  TraceRecord record(long iter, bool accepted) const {
    return TraceRecord{iter,
                       current_.report,
                       accepted,
                       centers_of(model_.params),
                       rates_of(model_.params),
                       ledger_ ? ledger_->m_iter() : 0};
  }

  void step_once() {
    if (ledger_) ledger_->count_iteration();
    const double beta = schedule_.beta0 * std::log1p(static_cast<double>(k_));
    const i64 dk = std::max<i64>(
        static_cast<i64>(std::ceil(schedule_.alpha0 -
                                   schedule_.alpha1 / static_cast<double>(k_))),
        1);
    const int n_loc = model_.n_loc();
    const i64 N = model_.params.front().grid_size();

    const int comp = static_cast<int>(rng_.uniform_int(0, n_loc - 1));
    const i64 magnitude = rng_.uniform_int(1, dk);
    const i64 step = rng_.bernoulli(0.5) ? magnitude : -magnitude;

    std::vector<i64> kc = centers_of(model_.params);
    kc[comp] = ((kc[comp] + step) % N + N) % N;

    bool accepted = false;
    if (proposal_valid(with_centers(model_.params, kc))) {
      const ObjectiveValue candidate = evaluate(kc);
      const double delta = candidate.score - current_.score;
      if (delta >= 0.0 || rng_.uniform() < std::exp(beta * delta)) {
        model_.params = with_centers(model_.params, kc);
        current_ = candidate;
        accepted = true;
        if (current_.score > best_.score) {
          best_ = current_;
          best_params_ = model_.params;
        }
      }
    }
    trace_.records.push_back(record(k_, accepted));
  }

  LclfModel model_;
  CenterObjective objective_;
  AnnealingSchedule schedule_;
  Rng rng_;
  std::shared_ptr<CostLedger> ledger_;
  std::map<std::vector<i64>, ObjectiveValue> config_cache_;
  ObjectiveValue current_;
  ObjectiveValue best_;
  std::vector<LfParam> best_params_;
  FitTrace trace_;
  long k_ = 0;
};

std::vector<cdouble> to_std(const Eigen::VectorXcd& v) {
  return {v.data(), v.data() + v.size()};
}

// Shared outer loop of fit_state / fit_amplitude. The `solve` callback
// evaluates one center configuration at given rates; `gradient` returns the
// ascent direction for the decay rates.
FitTrace run_fit(const LclfModel& init, const AnnealingSchedule& schedule,
                 bool optimize_a, std::uint64_t seed,
                 const std::shared_ptr<CostLedger>& ledger,
                 const std::function<ObjectiveValue(const std::vector<LfParam>&)>& solve,
                 const std::function<std::vector<double>(
                     const std::vector<LfParam>&, const ObjectiveValue&)>& gradient) {
  MetropolisChain chain(init, solve, schedule, seed, ledger);
  if (!optimize_a) {
    chain.run(schedule.max_iters);
    return chain.finish();
  }
  while (!chain.run(schedule.steps_per_sweep) &&
         chain.steps_taken() < schedule.max_iters) {
    // gradient ascent on the decay rates with backtracking halving
    const std::vector<LfParam>& params = chain.params();
    const ObjectiveValue at_current = solve(params);
    const std::vector<double> grad = gradient(params, at_current);
    std::vector<double> a = rates_of(params);
    double step = kInitialLineSearchStep;
    for (int h = 0; h < kMaxHalvings; ++h) {
      std::vector<double> a_next = a;
      for (std::size_t i = 0; i < a.size(); ++i) {
        a_next[i] = std::max(a[i] + step * grad[i], kMinDecayRate);
      }
      const ObjectiveValue trial = solve(with_rates(params, a_next));
      if (trial.score > at_current.score) {
        chain.reset_rates(a_next);
        break;
      }
      step *= 0.5;
    }
  }
  return chain.finish();
}

}  // namespace

singular_basis_error::singular_basis_error(int first_in, int second_in)
    : std::runtime_error("basis functions " + std::to_string(first_in) + " and " +
                         std::to_string(second_in) +
                         " coincide; overlap matrix is singular"),
      first(first_in),
      second(second_in) {}

void check_params_distinct(const std::vector<LfParam>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = i + 1; j < params.size(); ++j) {
      if (effectively_equal(params[i], params[j])) {
        throw singular_basis_error(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
}

Eigen::MatrixXd lf_overlap_matrix(const std::vector<LfParam>& params) {
  const int m = static_cast<int>(params.size());
  Eigen::MatrixXd S(m, m);
  for (int i = 0; i < m; ++i) {
    S(i, i) = 1.0;
    for (int j = i + 1; j < m; ++j) {
      S(i, j) = S(j, i) = lf_overlap(params[i].n, params[i].a, params[j].a,
                                     params[i].k_c - params[j].k_c);
    }
  }
  return S;
}

Eigen::MatrixXd lf_sq_overlap_matrix(const std::vector<LfParam>& params) {
  const int m = static_cast<int>(params.size());
  Eigen::MatrixXd Q(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      Q(i, j) = Q(j, i) = lf_sq_overlap(params[i].n, params[i].a, params[j].a,
                                        params[i].k_c - params[j].k_c);
    }
  }
  return Q;
}

FidelitySolution solve_coefficients_fidelity(const Eigen::VectorXcd& b,
                                             const Eigen::MatrixXd& S) {
  const Eigen::Index m = b.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(kEigenvalueFloor);
  const Eigen::MatrixXcd W =
      (es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal())
          .cast<cdouble>();

  // G = conj(b) b^T; whiten and take the top eigenpair of W^H G W.
  const Eigen::MatrixXcd G = b.conjugate() * b.transpose();
  const Eigen::MatrixXcd M = W.adjoint() * G * W;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ms(M);
  FidelitySolution out;
  out.kappa_max = ms.eigenvalues()(m - 1);
  out.d = W * ms.eigenvectors().col(m - 1);
  const double snorm =
      std::sqrt(std::real(out.d.dot(S.cast<cdouble>() * out.d)));
  if (snorm > 0.0) out.d /= snorm;
  return out;
}

FidelitySolution solve_coefficients_fidelity(const std::vector<LfParam>& params,
                                             const Eigen::VectorXcd& b) {
  check_params_distinct(params);
  return solve_coefficients_fidelity(b, lf_overlap_matrix(params));
}

ResidualSolution solve_coefficients_residual(const Eigen::VectorXd& h,
                                             const Eigen::MatrixXd& Q,
                                             double target_self_norm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  ResidualSolution out;
  out.ill_conditioned = !(lo > 0.0) || hi / lo > kConditionLimit;
  out.d = Q.ldlt().solve(h);
  out.residual_sq = target_self_norm - out.d.dot(h);
  return out;
}

ResidualSolution solve_coefficients_residual(const std::vector<LfParam>& params,
                                             const Eigen::VectorXd& h,
                                             double target_self_norm) {
  check_params_distinct(params);
  return solve_coefficients_residual(h, lf_sq_overlap_matrix(params),
                                     target_self_norm);
}

std::vector<double> fidelity_gradient_a(
    const std::vector<LfParam>& params, const Eigen::VectorXcd& d,
    double kappa_max, const Eigen::VectorXcd& b,
    const std::function<cdouble(const LfParam&)>& b_oracle, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
  const int m = static_cast<int>(params.size());
  const cdouble bd = b.cwiseProduct(d).sum();  // sum_j b_j d_j
  std::vector<double> grad(m, 0.0);
  for (int l = 0; l < m; ++l) {
    double step = fd_step;
    if (params[l].a - step < kMinDecayRate) step = params[l].a - kMinDecayRate;
    const LfParam up(params[l].n, params[l].a + step, params[l].k_c);
    const LfParam dn(params[l].n, params[l].a - step, params[l].k_c);
    const cdouble db = (b_oracle(up) - b_oracle(dn)) / (2.0 * step);

    // quantum part: d^H (dG) d with dG = e_l conj(db) b^T + conj(b) db e_l^T
    const double quantum = 2.0 * std::real(std::conj(d(l)) * std::conj(db) * bd);

    // classical part: central difference of the overlap-matrix row l
    double classical = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == l) continue;  // diagonal entries stay 1
      const double v_up = lf_overlap(params[l].n, up.a, params[j].a,
                                     params[l].k_c - params[j].k_c);
      const double v_dn = lf_overlap(params[l].n, dn.a, params[j].a,
                                     params[l].k_c - params[j].k_c);
      const double dv = (v_up - v_dn) / (2.0 * step);
      classical += 2.0 * std::real(std::conj(d(l)) * dv * d(j));
    }
    grad[l] = quantum - kappa_max * classical;
  }
  return grad;
}

std::vector<double> residual_gradient_a(
    const std::vector<LfParam>& params, const Eigen::VectorXd& d,
    const std::function<double(const LfParam&)>& h_oracle, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
  const int m = static_cast<int>(params.size());
  std::vector<double> grad(m, 0.0);
  for (int l = 0; l < m; ++l) {
    double step = fd_step;
    if (params[l].a - step < kMinDecayRate) step = params[l].a - kMinDecayRate;
    const LfParam up(params[l].n, params[l].a + step, params[l].k_c);
    const LfParam dn(params[l].n, params[l].a - step, params[l].k_c);
    const double dh = (h_oracle(up) - h_oracle(dn)) / (2.0 * step);

    std::vector<LfParam> p_up(params), p_dn(params);
    p_up[l] = up;
    p_dn[l] = dn;
    const Eigen::MatrixXd dQ =
        (lf_sq_overlap_matrix(p_up) - lf_sq_overlap_matrix(p_dn)) / (2.0 * step);
    grad[l] = -2.0 * d(l) * dh + d.dot(dQ * d);
  }
  return grad;
}

FitTrace metropolis_centers(const LclfModel& init,
                            const CenterObjective& objective,
                            const AnnealingSchedule& schedule,
                            std::uint64_t seed,
                            const std::shared_ptr<CostLedger>& ledger) {
  MetropolisChain chain(init, objective, schedule, seed, ledger);
  chain.run(schedule.max_iters);
  return chain.finish();
}

FitTrace fit_state(const FidelityFitProblem& problem) {
  std::shared_ptr<CostLedger> ledger = problem.ledger;
  std::function<OverlapEstimate(const LfParam&)> oracle = problem.b_oracle;
  std::shared_ptr<OverlapEstimator> estimator;
  if (!oracle) {
    if (!ledger) ledger = std::make_shared<CostLedger>();
    estimator = std::make_shared<OverlapEstimator>(problem.target,
                                                   problem.budget, ledger);
    oracle = [estimator](const LfParam& p) { return estimator->complex_overlap(p); };
  } else if (!ledger) {
    ledger = std::make_shared<CostLedger>();
  }

  const auto solve = [oracle](const std::vector<LfParam>& params) {
    Eigen::VectorXcd b(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      b(static_cast<Eigen::Index>(i)) = oracle(params[i]).value;
    }
    const FidelitySolution sol = solve_coefficients_fidelity(
        b, lf_overlap_matrix(params));
    return ObjectiveValue{sol.kappa_max, 1.0 - sol.kappa_max, to_std(sol.d)};
  };
  const auto gradient = [oracle, fd = problem.fd_step](
                            const std::vector<LfParam>& params,
                            const ObjectiveValue& at) {
    Eigen::VectorXcd b(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      b(static_cast<Eigen::Index>(i)) = oracle(params[i]).value;
    }
    Eigen::VectorXcd d(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      d(static_cast<Eigen::Index>(i)) = at.d[i];
    }
    const auto scalar_oracle = [oracle](const LfParam& p) {
      return oracle(p).value;
    };
    return fidelity_gradient_a(params, d, at.score, b, scalar_oracle, fd);
  };
  return run_fit(problem.init, problem.schedule, problem.optimize_a,
                 problem.seed, ledger, solve, gradient);
}

FitTrace fit_amplitude(const AmplitudeFitProblem& problem) {
  std::shared_ptr<CostLedger> ledger = problem.ledger;
  std::function<OverlapEstimate(const LfParam&)> h_oracle = problem.h_oracle;
  std::function<OverlapEstimate()> self_norm = problem.self_norm_oracle;
  std::shared_ptr<OverlapEstimator> estimator;
  if (!h_oracle) {
    if (!ledger) ledger = std::make_shared<CostLedger>();
    estimator = std::make_shared<OverlapEstimator>(problem.target,
                                                   problem.budget, ledger);
    h_oracle = [estimator](const LfParam& p) { return estimator->sq_overlap(p); };
    self_norm = [estimator]() { return estimator->target_self_norm(); };
  } else if (!ledger) {
    ledger = std::make_shared<CostLedger>();
  }
  if (!self_norm) {
    throw std::invalid_argument("amplitude fit needs a self-norm oracle");
  }
  const double ytt = std::real(self_norm().value);

  const auto solve = [h_oracle, ytt](const std::vector<LfParam>& params) {
    Eigen::VectorXd h(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      h(static_cast<Eigen::Index>(i)) = std::real(h_oracle(params[i]).value);
    }
    const ResidualSolution sol = solve_coefficients_residual(
        h, lf_sq_overlap_matrix(params), ytt);
    std::vector<cdouble> d(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      d[i] = sol.d(static_cast<Eigen::Index>(i));
    }
    return ObjectiveValue{-sol.residual_sq, sol.residual_sq, std::move(d)};
  };
  const auto gradient = [h_oracle, fd = problem.fd_step](
                            const std::vector<LfParam>& params,
                            const ObjectiveValue& at) {
    Eigen::VectorXd d(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      d(static_cast<Eigen::Index>(i)) = std::real(at.d[i]);
    }
    const auto scalar_oracle = [h_oracle](const LfParam& p) {
      return std::real(h_oracle(p).value);
    };
    const std::vector<double> g = residual_gradient_a(params, d, scalar_oracle, fd);
    // the chain maximizes -residual^2
    std::vector<double> ascent(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) ascent[i] = -g[i];
    return ascent;
  };
  return run_fit(problem.init, problem.schedule, problem.optimize_a,
                 problem.seed, ledger, solve, gradient);
}

}  // namespace lfr
