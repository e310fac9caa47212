#pragma once

#include "srml/solver.hpp"

namespace srml::baselines {

enum class IndependentKind { Ridge, Lasso };

// Strict sign regularization, realized as the large-c limit of the slacked
// model. The residual violation mass makes the quality of the surrogate
// visible.
struct SsmlResult {
  FitResult fit;
  double sign_violation_mass = 0.0;  // sum of max(0, -u_t u_{t+1}) at the end
};

SsmlResult fit_ssml(const MultiTaskProblem& p, LossKind loss, const SolverConfig& cfg,
                    double c_strict = 1e6);

// Per-task fits with no cross-task coupling: ridge by normal equations,
// lasso by proximal gradient descent to a 1e-8 step change.
WeightMatrix fit_independent(const MultiTaskProblem& p, LossKind loss, IndependentKind kind,
                             double lambda);

}  // namespace srml::baselines
