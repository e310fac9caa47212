#pragma once

#include <optional>

namespace srml {

enum class RegKind { L1, L2 };

// How the ADMM penalty rho is chosen: either taken verbatim from the config,
// or derived from the loss-gradient Lipschitz constant as margin * 2H (the
// sufficient condition for global convergence requires rho > 2H).
enum class RhoPolicy { Fixed, FromLipschitz };

struct SolverConfig {
  double lambda = 0.01;  // weight of the per-task regularizer
  double c = 0.1;        // weight of the cross-task sign-slack penalty
  double rho = 0.1;      // ADMM penalty (RhoPolicy::Fixed)
  RegKind reg_kind = RegKind::L2;

  double primal_tol = 1e-4;
  double dual_tol = 1e-4;
  int max_outer_iters = 500;
  int max_inner_iters = 200;

  // Inner gradient step; nullopt derives 1/(H_t + 2*lambda + rho) per task.
  std::optional<double> inner_step_size;

  RhoPolicy rho_policy = RhoPolicy::Fixed;
  double rho_margin = 1.25;  // effective rho = rho_margin * 2H; must be > 1

  // Exact normal-equation w-update, valid for squared loss with L2 (or no)
  // regularization only. Default stays on gradient descent.
  bool closed_form_w = false;

  void validate() const;
};

}  // namespace srml
