#pragma once

#include <Eigen/Dense>
#include <vector>

#include "srml/errors.hpp"

namespace srml {

enum class ProblemKind { Regression, Classification };

// One supervised task: m_t instances with d features and a real target.
struct TaskData {
  Eigen::MatrixXd X;  // m_t x d
  Eigen::VectorXd y;  // m_t

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
};

// T tasks over a shared feature space. Task order is meaningful: the sign
// chain couples task t with task t+1.
struct MultiTaskProblem {
  std::vector<TaskData> tasks;
  ProblemKind kind = ProblemKind::Regression;

  Eigen::Index task_count() const { return static_cast<Eigen::Index>(tasks.size()); }
  Eigen::Index dim() const { return tasks.empty() ? 0 : tasks.front().dim(); }
  Eigen::Index total_rows() const {
    Eigen::Index n = 0;
    for (const auto& t : tasks) n += t.rows();
    return n;
  }
};

// Throws DimensionMismatch, NonFiniteData or BadLabels when an invariant is
// violated; returns normally otherwise.
void validate_problem(const MultiTaskProblem& p);

}  // namespace srml
