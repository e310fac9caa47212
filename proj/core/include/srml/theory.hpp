#pragma once

#include "srml/problem.hpp"
#include "srml/weights.hpp"

namespace srml::theory {

// Inputs of the generalization bound. The slack level beta does not appear:
// it constrains signs only and cannot grow the weight magnitudes the bound
// depends on.
struct BoundInputs {
  double lipschitz_L = 1.0;  // Lipschitz constant of the loss, caller-supplied
  double alpha = 0.0;        // L1 budget sum_t ||w_t||_1
  double epsilon = 0.05;     // failure probability, in (0,1)
  long m = 1;                // samples per task
  long T = 1;                // task count

  void validate() const;
};

// max over tasks t and feature columns j of sum_i |X_t(i,j)|.
double l1_inf_norm(const MultiTaskProblem& p);

// Excess-risk bound 2 L alpha / (mT) * x_norm + tail(epsilon, mT), where the
// default tail is 2 sqrt(2 ln(2/eps) / (mT)). alt_tail switches to the
// sqrt(9 ln(2/eps) / (2mT)) variant; the two are not equivalent.
double generalization_bound(const BoundInputs& b, double x_norm, bool alt_tail = false);

struct RademacherTerms {
  double tight = 0.0;  // alpha * max column L1 norm
  double loose = 0.0;  // alpha * sqrt(sum_t sum_i ||x_ti||^2)
};

RademacherTerms rademacher_bound_terms(const MultiTaskProblem& p, double alpha);

// Evaluates sum_{(t,j) != (t*,j*)} x_tij^2 > 2 sum_{k<l} |x_t*kj* x_t*lj*|
// where (t*, j*) maximizes the column L1 norm. Throws NonUniqueMaximizer when
// the argmax is tied.
bool assumption2_holds(const MultiTaskProblem& p);

// alpha attained by a fitted model: sum_t ||w_t||_1.
double attained_l1_budget(const WeightMatrix& w);

}  // namespace srml::theory
