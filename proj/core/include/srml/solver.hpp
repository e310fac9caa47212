#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "srml/config.hpp"
#include "srml/losses.hpp"
#include "srml/problem.hpp"
#include "srml/weights.hpp"

namespace srml {

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double vk = 0.0;
};

// Per-iteration ADMM state. Single-writer: owned by one fit() call.
struct SolverState {
  WeightMatrix w, u, y;
  WeightMatrix w_prev, u_prev;
  // rho * (w - u) as applied to y this iteration; kept so the dual-update
  // identity y^{k+1} - y^k = rho (w^{k+1} - u^{k+1}) can be checked exactly.
  Eigen::MatrixXd last_dual_step;
  double rho = 0.0;  // effective penalty after policy resolution
  int iter = 0;
  double primal_residual_norm = 0.0;
  double dual_residual_norm = 0.0;
  double objective = 0.0;
  std::vector<double> vk_history;  // running minimum, nonincreasing
  bool converged = false;
};

struct FitResult {
  WeightMatrix weights;  // final w
  WeightMatrix mirror;   // final u
  WeightMatrix dual;     // final y
  std::vector<TraceRow> trace;
  bool converged = false;
  int iterations = 0;
  double effective_rho = 0.0;
};

using IterationObserver = std::function<void(const SolverState&)>;

// Objective of the consensus reformulation:
//   sum_t [ L_t(w_t) + lambda * Omega(w_t) ]
//     + c * sum_{t<T} sum_j max(0, -u_{t,j} u_{t+1,j})
double objective_value(const MultiTaskProblem& p, LossKind loss, const SolverConfig& cfg,
                       const WeightMatrix& w, const WeightMatrix& u);

// sum over consecutive task pairs and features of max(0, -u_t,j * u_t+1,j).
double sign_violation_mass(const WeightMatrix& u);

// primal = ||w - u|| over the stacked vector, dual = rho ||u - u_prev||.
std::pair<double, double> residuals(const SolverState& s);

// Appends min(previous v, ||w - w_prev||^2 + ||u - u_prev||^2) to vk_history
// and returns it.
double update_vk(SolverState& s);

// Outer ADMM loop: per-task w-updates, sequential u-sweep, dual update,
// until both residuals fall below their tolerances or max_outer_iters is
// reached (converged=false in that case; the last state is still returned).
FitResult fit(const MultiTaskProblem& p, LossKind loss, const SolverConfig& cfg,
              const std::optional<WeightMatrix>& init = std::nullopt,
              const IterationObserver& observer = {});

// Per-task predictions X_t w_t; classification scores are sigmoid(X_t w_t).
std::vector<Eigen::VectorXd> predict(const MultiTaskProblem& p, const WeightMatrix& w);

}  // namespace srml
