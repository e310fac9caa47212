#include "srml/baselines.hpp"

#include "srml/subproblems.hpp"

namespace srml::baselines {

SsmlResult fit_ssml(const MultiTaskProblem& p, LossKind loss, const SolverConfig& cfg,
                    double c_strict) {
  SolverConfig strict = cfg;
  strict.c = c_strict;
  SsmlResult out;
  out.fit = fit(p, loss, strict);
  out.sign_violation_mass = sign_violation_mass(out.fit.mirror);
  return out;
}

WeightMatrix fit_independent(const MultiTaskProblem& p, LossKind loss, IndependentKind kind,
                             double lambda) {
  validate_problem(p);
  const Eigen::Index d = p.dim();
  WeightMatrix w(d, p.task_count());

  for (Eigen::Index t = 0; t < p.task_count(); ++t) {
    const TaskData& task = p.tasks[static_cast<std::size_t>(t)];
    if (kind == IndependentKind::Ridge && loss == LossKind::Squared) {
      // ||y - Xw||^2 + lambda ||w||^2  =>  (X^T X + lambda I) w = X^T y
      Eigen::MatrixXd A = task.X.transpose() * task.X;
      A.diagonal().array() += lambda;
      w.col(t) = A.ldlt().solve(task.X.transpose() * task.y);
      continue;
    }
    // Proximal (lasso) / plain (ridge with non-quadratic loss) gradient
    // descent, reusing the w-subproblem with the consensus term disabled.
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.reg_kind = kind == IndependentKind::Lasso ? RegKind::L1 : RegKind::L2;
    cfg.rho = 1e-12;  // no prox center
    cfg.max_inner_iters = 100000;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
    w.col(t) = solve_w_subproblem(task, loss, zero, zero, cfg);
  }
  return w;
}

}  // namespace srml::baselines
