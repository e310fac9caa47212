#include "srml/problem.hpp"

#include <cmath>
#include <string>

namespace srml {

void validate_problem(const MultiTaskProblem& p) {
  if (p.tasks.empty()) throw DimensionMismatch("problem has no tasks");

  const Eigen::Index d = p.tasks.front().dim();
  if (d < 1) throw DimensionMismatch("feature count must be >= 1");

  for (std::size_t t = 0; t < p.tasks.size(); ++t) {
    const TaskData& task = p.tasks[t];
    const std::string where = "task " + std::to_string(t);
    if (task.dim() != d) {
      throw DimensionMismatch(where + ": feature count " + std::to_string(task.dim()) +
                              " != " + std::to_string(d));
    }
    if (task.rows() < 1) throw DimensionMismatch(where + ": no instances");
    if (task.y.size() != task.rows()) {
      throw DimensionMismatch(where + ": target length " + std::to_string(task.y.size()) +
                              " != row count " + std::to_string(task.rows()));
    }
    if (!task.X.allFinite() || !task.y.allFinite()) {
      throw NonFiniteData(where + ": non-finite value in data");
    }
    if (p.kind == ProblemKind::Classification) {
      for (Eigen::Index i = 0; i < task.y.size(); ++i) {
        const double v = task.y[i];
        if (v != 0.0 && v != 1.0) {
          throw BadLabels(where + ": target " + std::to_string(v) + " outside {0,1}");
        }
      }
    }
  }
}

}  // namespace srml
