#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "srml/config.hpp"
#include "srml/losses.hpp"
#include "srml/problem.hpp"
#include "srml/weights.hpp"

namespace srml {

// One scalar u_{t,j} subproblem:
//   min_u  c * sum_n max(0, -u * a_n)  -  y * u  +  (rho/2) (w - u)^2
// where a_n are the fixed neighbor values u_{t-1,j} (already updated this
// sweep) and u_{t+1,j} (from the previous sweep). Boundary tasks have one
// neighbor, interior tasks two, and a single-task chain none.
struct UScalarInstance {
  double w_target = 0.0;  // w_{t,j} from the current w-sweep
  double y_dual = 0.0;    // y_{t,j}
  double rho = 1.0;
  double c = 0.0;
  std::array<double, 2> neighbors{};
  int neighbor_count = 0;
};

double u_scalar_objective(const UScalarInstance& inst, double u);

// Global minimizer. Both hinge terms break only at u = 0, so the objective
// is quadratic on each half-line: clamp each half-line vertex into its
// half-line, evaluate, keep the lower (ties toward smaller |u|).
double solve_u_scalar(const UScalarInstance& inst);

// Elementwise solve_u_scalar for task t. u holds columns < t already updated
// this sweep (Gauss-Seidel order) and columns > t from the previous sweep.
Eigen::VectorXd solve_u_block(Eigen::Index t, const WeightMatrix& w, const WeightMatrix& u,
                              const WeightMatrix& y, double rho, double c);

// 1 / (H_t + 2*lambda + rho) with H_t the task-local gradient Lipschitz
// constant; guarantees descent on the smooth part of the w-subproblem.
double auto_step_size(const TaskData& t, LossKind loss, const SolverConfig& cfg);

// Reused LDLT factorization of (2 X^T X + (2*lambda + rho) I) for the
// closed-form w-update; valid as long as the task and config stay fixed.
struct WSolveCache {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  bool ready = false;
};

// Approximately minimizes
//   L_t(w) + lambda * Omega(w) + (rho/2) ||w - u_t + y_t/rho||^2
// by gradient descent (L2) or proximal gradient descent (L1), stopping when
// the step-to-step change falls below 1e-8 or max_inner_iters is reached.
// With cfg.closed_form_w and squared loss + L2 the exact normal-equation
// solution is returned instead. Throws StepDiverged when the subproblem
// objective rises for 10 consecutive steps.
Eigen::VectorXd solve_w_subproblem(const TaskData& t, LossKind loss, const Eigen::VectorXd& u_t,
                                   const Eigen::VectorXd& y_t, const SolverConfig& cfg,
                                   const Eigen::VectorXd* warm_start = nullptr,
                                   std::optional<double> step_hint = std::nullopt,
                                   WSolveCache* cache = nullptr);

inline double soft_threshold(double v, double thresh) {
  if (v > thresh) return v - thresh;
  if (v < -thresh) return v + thresh;
  return 0.0;
}

}  // namespace srml
