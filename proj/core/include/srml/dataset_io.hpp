#pragma once

#include <string>
#include <vector>

#include "srml/problem.hpp"

namespace srml::harness {

// A problem plus the task identifiers it was loaded with, in
// first-appearance order.
struct Dataset {
  MultiTaskProblem problem;
  std::vector<std::string> task_ids;
};

// Flat-table schema with a header row: task_id, target, then d feature
// columns. Rows are grouped by task_id preserving first-appearance order.
// Throws ParseError (with the offending line number), InconsistentColumns,
// EmptyTask or IoError.
Dataset load_csv(const std::string& path);

void save_csv(const std::string& path, const MultiTaskProblem& p,
              const std::vector<std::string>* task_ids = nullptr);

}  // namespace srml::harness
