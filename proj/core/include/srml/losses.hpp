#pragma once

#include <Eigen/Dense>

#include "srml/problem.hpp"

namespace srml {

enum class LossKind { Squared, Logistic };

inline LossKind default_loss(ProblemKind kind) {
  return kind == ProblemKind::Regression ? LossKind::Squared : LossKind::Logistic;
}

// ||y - X w||_2^2, unnormalized.
double squared_loss(const TaskData& t, const Eigen::VectorXd& w);

// 2 X^T (X w - y).
Eigen::VectorXd squared_loss_grad(const TaskData& t, const Eigen::VectorXd& w);

// Mean negative log-likelihood under the sigmoid model. Sigmoid inputs are
// clamped to [-30, 30] and log arguments floored at 1e-12.
double logistic_loss(const TaskData& t, const Eigen::VectorXd& w);

// (1/m) sum_j (sigma(x_j . w) - y_j) x_j.
Eigen::VectorXd logistic_loss_grad(const TaskData& t, const Eigen::VectorXd& w);

double loss_value(LossKind kind, const TaskData& t, const Eigen::VectorXd& w);
Eigen::VectorXd loss_grad(LossKind kind, const TaskData& t, const Eigen::VectorXd& w);

// Lipschitz constant of one task's loss gradient:
//   squared:  2 ||X_t^T X_t||  (spectral norm)
//   logistic: (1/m_t) sum_j ||x_j||^2
double task_lipschitz(LossKind kind, const TaskData& t);

// max over tasks of task_lipschitz: H_reg for regression problems, H_class
// for classification.
double lipschitz_H(const MultiTaskProblem& p, LossKind kind);
double lipschitz_H(const MultiTaskProblem& p);

double sigmoid(double z);

}  // namespace srml
