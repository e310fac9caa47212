#include "srml/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srml/subproblems.hpp"

namespace srml {

double sign_violation_mass(const WeightMatrix& u) {
  double total = 0.0;
  for (Eigen::Index t = 0; t + 1 < u.cols(); ++t) {
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
      total += std::max(0.0, -u(j, t) * u(j, t + 1));
    }
  }
  return total;
}

double objective_value(const MultiTaskProblem& p, LossKind loss, const SolverConfig& cfg,
                       const WeightMatrix& w, const WeightMatrix& u) {
  double obj = 0.0;
  for (Eigen::Index t = 0; t < p.task_count(); ++t) {
    const Eigen::VectorXd wt = w.col(t);
    const double reg = cfg.reg_kind == RegKind::L1 ? wt.lpNorm<1>() : wt.squaredNorm();
    obj += loss_value(loss, p.tasks[static_cast<std::size_t>(t)], wt) + cfg.lambda * reg;
  }
  return obj + cfg.c * sign_violation_mass(u);
}

std::pair<double, double> residuals(const SolverState& s) {
  const double primal = (s.w - s.u).norm();
  const double dual = s.rho * (s.u - s.u_prev).norm();
  return {primal, dual};
}

double update_vk(SolverState& s) {
  double raw = 0.0;
  for (Eigen::Index t = 0; t < s.w.cols(); ++t) {
    raw += (s.w.col(t) - s.w_prev.col(t)).squaredNorm();
    raw += (s.u.col(t) - s.u_prev.col(t)).squaredNorm();
  }
  const double v = s.vk_history.empty() ? raw : std::min(s.vk_history.back(), raw);
  s.vk_history.push_back(v);
  return v;
}

FitResult fit(const MultiTaskProblem& p, LossKind loss, const SolverConfig& cfg,
              const std::optional<WeightMatrix>& init, const IterationObserver& observer) {
  validate_problem(p);
  cfg.validate();
  const bool loss_matches = (loss == LossKind::Squared) == (p.kind == ProblemKind::Regression);
  if (!loss_matches) throw std::invalid_argument("loss kind does not match problem kind");

  const Eigen::Index d = p.dim();
  const Eigen::Index T = p.task_count();

  SolverConfig run_cfg = cfg;
  if (cfg.rho_policy == RhoPolicy::FromLipschitz) {
    run_cfg.rho = cfg.rho_margin * 2.0 * lipschitz_H(p, loss);
    run_cfg.rho_policy = RhoPolicy::Fixed;
  }

  SolverState s;
  s.rho = run_cfg.rho;
  if (init) {
    if (init->rows() != d || init->cols() != T)
      throw std::invalid_argument("init weight matrix has wrong shape");
    s.w = *init;
    s.u = *init;
  } else {
    s.w = WeightMatrix::Zero(d, T);
    s.u = WeightMatrix::Zero(d, T);
  }
  s.y = WeightMatrix::Zero(d, T);

  // Per-task step sizes and, on the closed-form path, reusable
  // factorizations; both stay valid for the whole run.
  std::vector<double> steps(static_cast<std::size_t>(T), 0.0);
  const bool needs_steps = !run_cfg.inner_step_size &&
                           !(run_cfg.closed_form_w && loss == LossKind::Squared &&
                             run_cfg.reg_kind == RegKind::L2);
  if (needs_steps) {
    for (Eigen::Index t = 0; t < T; ++t) {
      steps[static_cast<std::size_t>(t)] =
          auto_step_size(p.tasks[static_cast<std::size_t>(t)], loss, run_cfg);
    }
  }
  std::vector<WSolveCache> caches(static_cast<std::size_t>(T));

  FitResult result;
  result.effective_rho = run_cfg.rho;
  result.trace.reserve(static_cast<std::size_t>(run_cfg.max_outer_iters));

  for (int k = 1; k <= run_cfg.max_outer_iters; ++k) {
    s.iter = k;
    s.w_prev = s.w;
    s.u_prev = s.u;

    for (Eigen::Index t = 0; t < T; ++t) {
      const std::size_t ti = static_cast<std::size_t>(t);
      const Eigen::VectorXd warm = s.w.col(t);
      s.w.col(t) = solve_w_subproblem(p.tasks[ti], loss, s.u.col(t), s.y.col(t), run_cfg, &warm,
                                      needs_steps ? std::optional<double>(steps[ti]) : std::nullopt,
                                      &caches[ti]);
    }

    // Gauss-Seidel: task t sees u_{t-1} from this sweep and u_{t+1} from the
    // previous one.
    for (Eigen::Index t = 0; t < T; ++t) {
      s.u.col(t) = solve_u_block(t, s.w, s.u, s.y, run_cfg.rho, run_cfg.c);
    }

    s.last_dual_step = run_cfg.rho * (s.w - s.u);
    s.y += s.last_dual_step;

    std::tie(s.primal_residual_norm, s.dual_residual_norm) = residuals(s);
    s.objective = objective_value(p, loss, run_cfg, s.w, s.u);
    const double vk = update_vk(s);
    s.converged = s.primal_residual_norm <= run_cfg.primal_tol &&
                  s.dual_residual_norm <= run_cfg.dual_tol;

    result.trace.push_back(
        {k, s.objective, s.primal_residual_norm, s.dual_residual_norm, vk});
    if (observer) observer(s);
    if (s.converged) break;
  }

  result.weights = std::move(s.w);
  result.mirror = std::move(s.u);
  result.dual = std::move(s.y);
  result.converged = s.converged;
  result.iterations = static_cast<int>(result.trace.size());
  return result;
}

std::vector<Eigen::VectorXd> predict(const MultiTaskProblem& p, const WeightMatrix& w) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(p.tasks.size());
  for (Eigen::Index t = 0; t < p.task_count(); ++t) {
    Eigen::VectorXd z = p.tasks[static_cast<std::size_t>(t)].X * w.col(t);
    if (p.kind == ProblemKind::Classification) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
    }
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace srml
