#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "srml/problem.hpp"
#include "srml/weights.hpp"

namespace srml::metrics {

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);
double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

// Mean of (ln(1+pred) - ln(1+truth))^2; predictions below -1 are clamped to
// -1 + 1e-9, truth must be > -1 elementwise.
double msle(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

// MAE / MSE divided by max(truth) - min(truth) over the evaluated split.
double nmae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);
double nmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

// Classification metrics on a 0-100 scale. auc is the rank-based ROC AUC
// with ties contributing 1/2; map is average precision over the score-sorted
// ranking. Both throw SingleClass when a class is missing.
double accuracy(const Eigen::VectorXd& pred_labels, const Eigen::VectorXd& truth_labels);
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& truth_labels);
double average_precision(const Eigen::VectorXd& scores, const Eigen::VectorXd& truth_labels);

// Per-(feature, task) comparison of learned vs true weight signs:
//   0  match (zero learned weights never conflict)
//  +1  learned positive where truth is nonpositive
//  -1  learned negative where truth is nonnegative
struct SignMatchResult {
  SignMatrix cells;       // d x T over {-1, 0, +1}
  double match_rate = 0;  // fraction of zero cells
};

SignMatchResult sign_match(const WeightMatrix& learned, const WeightMatrix& truth,
                           double zero_tol = 0.0);

// Unweighted mean of per-task metrics for a fitted weight matrix. Regression
// reports mse/mae/msle/nmae/nmse; classification reports acc/auc/map, with
// auc and map averaged over the tasks where both classes occur (omitted if
// there are none).
std::map<std::string, double> evaluate(const MultiTaskProblem& p, const WeightMatrix& w);

}  // namespace srml::metrics
