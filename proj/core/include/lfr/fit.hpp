// Copyright 2026 The lfr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "lfr/basis.hpp"
#include "lfr/estimator.hpp"

namespace lfr {

/// Two basis functions coincide, making the overlap matrix singular.
class singular_basis_error : public std::runtime_error {
 public:
  singular_basis_error(int first, int second);
  int first;
  int second;
};

/// Throws singular_basis_error naming the offending pair.
void check_params_distinct(const std::vector<LfParam>& params);

/// Classical overlap matrix S of the basis states.
Eigen::MatrixXd lf_overlap_matrix(const std::vector<LfParam>& params);

/// Classical overlap matrix Q of the squared basis vectors.
Eigen::MatrixXd lf_sq_overlap_matrix(const std::vector<LfParam>& params);

struct FidelitySolution {
  Eigen::VectorXcd d;     // normalized so d^H S d = 1
  double kappa_max = 0.0; // achieved fidelity
};

/// Solves the stationarity condition G d = kappa S d for G built from the
/// quantum overlaps b (G = conj(b) b^T, Hermitian rank one) and returns the
/// top eigenpair. Solved by symmetric whitening of S with eigenvalue floor
/// 1e-12.
FidelitySolution solve_coefficients_fidelity(const Eigen::VectorXcd& b,
                                             const Eigen::MatrixXd& S);

/// Same, building S from the parameters; throws singular_basis_error naming
/// the offending pair when two basis functions coincide.
FidelitySolution solve_coefficients_fidelity(const std::vector<LfParam>& params,
                                             const Eigen::VectorXcd& b);

struct ResidualSolution {
  Eigen::VectorXd d;
  double residual_sq = 0.0;
  bool ill_conditioned = false;  // condition estimate above 1e12
};

/// Solves Q d = h and evaluates the squared residual
/// <y,y> - d^T Q d. The target enters only through h and its self norm.
ResidualSolution solve_coefficients_residual(const Eigen::VectorXd& h,
                                             const Eigen::MatrixXd& Q,
                                             double target_self_norm);

/// Same, building Q from the parameters; throws singular_basis_error on a
/// coincident pair.
ResidualSolution solve_coefficients_residual(const std::vector<LfParam>& params,
                                             const Eigen::VectorXd& h,
                                             double target_self_norm);

/// d(fidelity)/d(a_l) at the solved coefficients: quantum part via central
/// differences of the overlap oracle, classical part via central differences
/// of the closed-form overlap matrix.
std::vector<double> fidelity_gradient_a(
    const std::vector<LfParam>& params, const Eigen::VectorXcd& d,
    double kappa_max, const Eigen::VectorXcd& b,
    const std::function<cdouble(const LfParam&)>& b_oracle, double fd_step);

/// d(squared residual)/d(a_l) at the solved coefficients.
std::vector<double> residual_gradient_a(
    const std::vector<LfParam>& params, const Eigen::VectorXd& d,
    const std::function<double(const LfParam&)>& h_oracle, double fd_step);

struct AnnealingSchedule {
  double beta0 = 100.0;   // inverse temperature scale, beta_k = beta0 ln(1+k)
  double alpha0 = 1.0;    // step magnitude cap: max(ceil(alpha0 - alpha1/k), 1)
  double alpha1 = 15.0;
  int max_iters = 1000;   // hard cap on Metropolis proposals
  double threshold = 0.01;  // stop once the report objective drops below
  int steps_per_sweep = 32; // proposals between decay-rate updates
};

struct TraceRecord {
  long iteration = 0;
  double objective = 0.0;  // report value: infidelity or squared residual
  bool accepted = false;
  std::vector<std::int64_t> k_c;
  std::vector<double> a;
  long m_iter = 0;
};

struct FitTrace {
  std::vector<TraceRecord> records;
  LclfModel final_model;     // best configuration seen
  double final_objective = 0.0;
  bool converged = false;
  long n_iter = 0;
  long m_iter = 0;
};

/// Objective evaluation for one center configuration: `score` is maximized by
/// the annealer, `report` is the user-facing decreasing objective.
struct ObjectiveValue {
  double score = 0.0;
  double report = 0.0;
  std::vector<cdouble> d;
};

using CenterObjective =
    std::function<ObjectiveValue(const std::vector<LfParam>&)>;

/// Annealed Metropolis search over the integer peak centers. Proposals move
/// one uniformly chosen component by a uniformly chosen signed step of
/// magnitude at most max(ceil(alpha0 - alpha1/k), 1), wrapping mod N.
/// Acceptance follows min{1, exp(beta_k * delta_score)} with
/// beta_k = beta0 ln(1+k). Objective values are cached per center vector;
/// proposals that would collide two identical basis functions are rejected
/// at proposal time without an evaluation.
FitTrace metropolis_centers(const LclfModel& init,
                            const CenterObjective& objective,
                            const AnnealingSchedule& schedule,
                            std::uint64_t seed,
                            const std::shared_ptr<CostLedger>& ledger = nullptr);

struct FidelityFitProblem {
  StateVector target;   // ignored when b_oracle is set
  MeasurementBudget budget;
  std::function<OverlapEstimate(const LfParam&)> b_oracle;  // optional
  std::shared_ptr<CostLedger> ledger;                       // optional
  LclfModel init;
  AnnealingSchedule schedule;
  bool optimize_a = false;
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
};

struct AmplitudeFitProblem {
  StateVector target;   // only |c_k|^2 is used; ignored when oracles are set
  MeasurementBudget budget;
  std::function<OverlapEstimate(const LfParam&)> h_oracle;     // optional
  std::function<OverlapEstimate()> self_norm_oracle;           // optional
  std::shared_ptr<CostLedger> ledger;                          // optional
  LclfModel init;
  AnnealingSchedule schedule;
  bool optimize_a = false;
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
};

/// Full state readout: per outer round, a Metropolis sweep over the centers,
/// a coefficient eigen-solve, an optional backtracking gradient step on the
/// decay rates, and a final re-solve. With optimize_a = false this reduces to
/// the plain annealed center search.
FitTrace fit_state(const FidelityFitProblem& problem);

/// Same loop with the linear solve and squared residual in place of the
/// eigenproblem and infidelity.
FitTrace fit_amplitude(const AmplitudeFitProblem& problem);

}  // namespace lfr
