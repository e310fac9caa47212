#include "srml/subproblems.hpp"

#include <cmath>

#include "srml/errors.hpp"

namespace srml {
namespace {

constexpr double kInnerStepTol = 1e-8;
constexpr int kMaxConsecutiveIncreases = 10;

double subproblem_objective(const TaskData& t, LossKind loss, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& target, const SolverConfig& cfg) {
  const double reg = cfg.reg_kind == RegKind::L1 ? w.lpNorm<1>() : w.squaredNorm();
  return loss_value(loss, t, w) + cfg.lambda * reg + 0.5 * cfg.rho * (w - target).squaredNorm();
}

}  // namespace

double u_scalar_objective(const UScalarInstance& inst, double u) {
  double f = -inst.y_dual * u + 0.5 * inst.rho * (inst.w_target - u) * (inst.w_target - u);
  for (int i = 0; i < inst.neighbor_count; ++i) {
    f += inst.c * std::max(0.0, -u * inst.neighbors[i]);
  }
  return f;
}

double solve_u_scalar(const UScalarInstance& inst) {
  // Linear slope each hinge contributes on the half-line where it is active.
  double slope_pos = 0.0;  // u >= 0, negative neighbors oppose
  double slope_neg = 0.0;  // u <= 0, positive neighbors oppose
  for (int i = 0; i < inst.neighbor_count; ++i) {
    const double a = inst.neighbors[i];
    if (a < 0.0) slope_pos += inst.c * (-a);
    if (a > 0.0) slope_neg -= inst.c * a;
  }

  const double cand_pos = std::max(0.0, inst.w_target + (inst.y_dual - slope_pos) / inst.rho);
  const double cand_neg = std::min(0.0, inst.w_target + (inst.y_dual - slope_neg) / inst.rho);

  const double f_pos = u_scalar_objective(inst, cand_pos);
  const double f_neg = u_scalar_objective(inst, cand_neg);
  if (f_pos < f_neg) return cand_pos;
  if (f_neg < f_pos) return cand_neg;
  return std::abs(cand_pos) <= std::abs(cand_neg) ? cand_pos : cand_neg;
}

Eigen::VectorXd solve_u_block(Eigen::Index t, const WeightMatrix& w, const WeightMatrix& u,
                              const WeightMatrix& y, double rho, double c) {
  const Eigen::Index d = w.rows();
  const Eigen::Index T = w.cols();
  Eigen::VectorXd out(d);
  UScalarInstance inst;
  inst.rho = rho;
  inst.c = c;
  for (Eigen::Index j = 0; j < d; ++j) {
    inst.w_target = w(j, t);
    inst.y_dual = y(j, t);
    inst.neighbor_count = 0;
    if (t > 0) inst.neighbors[inst.neighbor_count++] = u(j, t - 1);
    if (t + 1 < T) inst.neighbors[inst.neighbor_count++] = u(j, t + 1);
    out[j] = solve_u_scalar(inst);
  }
  return out;
}

double auto_step_size(const TaskData& t, LossKind loss, const SolverConfig& cfg) {
  return 1.0 / (task_lipschitz(loss, t) + 2.0 * cfg.lambda + cfg.rho);
}

Eigen::VectorXd solve_w_subproblem(const TaskData& t, LossKind loss, const Eigen::VectorXd& u_t,
                                   const Eigen::VectorXd& y_t, const SolverConfig& cfg,
                                   const Eigen::VectorXd* warm_start,
                                   std::optional<double> step_hint, WSolveCache* cache) {
  const Eigen::Index d = t.dim();
  const Eigen::VectorXd target = u_t - y_t / cfg.rho;  // prox center u - y/rho

  if (cfg.closed_form_w && loss == LossKind::Squared && cfg.reg_kind == RegKind::L2) {
    // (2 X^T X + (2 lambda + rho) I) w = 2 X^T y + rho u - y_dual
    const Eigen::VectorXd rhs = 2.0 * (t.X.transpose() * t.y) + cfg.rho * u_t - y_t;
    if (cache != nullptr) {
      if (!cache->ready) {
        Eigen::MatrixXd A = 2.0 * (t.X.transpose() * t.X);
        A.diagonal().array() += 2.0 * cfg.lambda + cfg.rho;
        cache->ldlt.compute(A);
        cache->ready = true;
      }
      return cache->ldlt.solve(rhs);
    }
    Eigen::MatrixXd A = 2.0 * (t.X.transpose() * t.X);
    A.diagonal().array() += 2.0 * cfg.lambda + cfg.rho;
    return A.ldlt().solve(rhs);
  }

  const double step = cfg.inner_step_size
                          ? *cfg.inner_step_size
                          : (step_hint ? *step_hint : auto_step_size(t, loss, cfg));
  const bool prox_l1 = cfg.reg_kind == RegKind::L1;
  const double l1_thresh = cfg.lambda * step;

  Eigen::VectorXd w = warm_start != nullptr ? *warm_start : Eigen::VectorXd::Zero(d);
  double obj = subproblem_objective(t, loss, w, target, cfg);
  int increases = 0;

  for (int it = 0; it < cfg.max_inner_iters; ++it) {
    Eigen::VectorXd g = loss_grad(loss, t, w) + cfg.rho * (w - target);
    if (!prox_l1) g += 2.0 * cfg.lambda * w;

    Eigen::VectorXd w_next = w - step * g;
    if (prox_l1) {
      for (Eigen::Index j = 0; j < d; ++j) w_next[j] = soft_threshold(w_next[j], l1_thresh);
    }

    const double delta = (w_next - w).norm();
    const double obj_next = subproblem_objective(t, loss, w_next, target, cfg);
    if (obj_next > obj) {
      if (++increases >= kMaxConsecutiveIncreases) {
        throw StepDiverged("w-subproblem objective rose for " +
                           std::to_string(kMaxConsecutiveIncreases) +
                           " consecutive steps (step size " + std::to_string(step) + ")");
      }
    } else {
      increases = 0;
    }
    w.swap(w_next);
    obj = obj_next;
    if (delta <= kInnerStepTol) break;
  }
  return w;
}

}  // namespace srml
