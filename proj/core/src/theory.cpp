#include "srml/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace srml::theory {
namespace {

struct ColumnArgmax {
  Eigen::Index task = 0;
  Eigen::Index col = 0;
  double value = 0.0;
  bool unique = true;
};

ColumnArgmax max_column_l1(const MultiTaskProblem& p) {
  ColumnArgmax best;
  bool first = true;
  for (Eigen::Index t = 0; t < p.task_count(); ++t) {
    const auto& X = p.tasks[static_cast<std::size_t>(t)].X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double norm = X.col(j).cwiseAbs().sum();
      if (first || norm > best.value) {
        best = {t, j, norm, true};
        first = false;
      } else if (norm == best.value) {
        best.unique = false;
      }
    }
  }
  return best;
}

}  // namespace

void BoundInputs::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  if (m < 1 || T < 1) throw std::invalid_argument("m and T must be >= 1");
  if (lipschitz_L <= 0.0) throw std::invalid_argument("Lipschitz constant must be > 0");
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
}

double l1_inf_norm(const MultiTaskProblem& p) { return max_column_l1(p).value; }

double generalization_bound(const BoundInputs& b, double x_norm, bool alt_tail) {
  b.validate();
  const double mT = static_cast<double>(b.m) * static_cast<double>(b.T);
  const double log_term = std::log(2.0 / b.epsilon);
  const double tail =
      alt_tail ? std::sqrt(9.0 * log_term / (2.0 * mT)) : 2.0 * std::sqrt(2.0 * log_term / mT);
  return 2.0 * b.lipschitz_L * b.alpha / mT * x_norm + tail;
}

RademacherTerms rademacher_bound_terms(const MultiTaskProblem& p, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  double sq = 0.0;
  for (const auto& t : p.tasks) sq += t.X.squaredNorm();
  return {alpha * l1_inf_norm(p), alpha * std::sqrt(sq)};
}

bool assumption2_holds(const MultiTaskProblem& p) {
  const ColumnArgmax best = max_column_l1(p);
  if (!best.unique) {
    throw NonUniqueMaximizer("column L1-norm argmax is tied; the tightness comparison needs a "
                             "unique maximizer");
  }

  double lhs = 0.0;  // all squared entries outside the maximizing column
  for (Eigen::Index t = 0; t < p.task_count(); ++t) {
    const auto& X = p.tasks[static_cast<std::size_t>(t)].X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (t == best.task && j == best.col) continue;
      lhs += X.col(j).squaredNorm();
    }
  }

  const auto& col = p.tasks[static_cast<std::size_t>(best.task)].X.col(best.col);
  double rhs = 0.0;  // twice the off-diagonal mass of the maximizing column
  for (Eigen::Index k = 0; k < col.size(); ++k) {
    for (Eigen::Index l = k + 1; l < col.size(); ++l) {
      rhs += std::abs(col[k] * col[l]);
    }
  }
  rhs *= 2.0;
  return lhs > rhs;
}

double attained_l1_budget(const WeightMatrix& w) { return w.cwiseAbs().sum(); }

}  // namespace srml::theory
