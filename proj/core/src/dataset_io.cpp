#include "srml/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace srml::harness {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, long line_no, const std::string& what) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what + " '" + s +
                     "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "': missing header row");
  const std::size_t n_cols = split_fields(line).size();
  if (n_cols < 3) {
    throw ParseError("'" + path + "': header needs task_id, target and at least one feature");
  }
  const std::size_t d = n_cols - 2;

  // Rows per task, keyed by first-appearance order.
  std::vector<std::string> task_order;
  std::map<std::string, std::size_t> task_index;
  std::vector<std::vector<double>> targets;       // per task
  std::vector<std::vector<double>> features;      // per task, row-major

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != n_cols) {
      throw InconsistentColumns("line " + std::to_string(line_no) + ": expected " +
                                std::to_string(n_cols) + " columns, got " +
                                std::to_string(fields.size()));
    }
    std::string id = fields[0];
    if (!id.empty() && id.back() == '\r') id.pop_back();
    auto [it, inserted] = task_index.try_emplace(id, task_order.size());
    if (inserted) {
      task_order.push_back(id);
      targets.emplace_back();
      features.emplace_back();
    }
    const std::size_t t = it->second;
    targets[t].push_back(parse_double(fields[1], line_no, "target"));
    for (std::size_t j = 0; j < d; ++j) {
      features[t].push_back(parse_double(fields[2 + j], line_no, "feature " + std::to_string(j)));
    }
  }
  if (task_order.empty()) throw EmptyTask("'" + path + "': no data rows");

  Dataset out;
  out.task_ids = task_order;
  out.problem.kind = ProblemKind::Regression;
  for (std::size_t t = 0; t < task_order.size(); ++t) {
    const std::size_t m = targets[t].size();
    TaskData task;
    task.y = Eigen::Map<const Eigen::VectorXd>(targets[t].data(), static_cast<Eigen::Index>(m));
    task.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(
        features[t].data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    out.problem.tasks.push_back(std::move(task));
  }

  // Targets are plain reals here; the caller decides the problem kind (the
  // CLI derives it from --loss or the model file).
  return out;
}

void save_csv(const std::string& path, const MultiTaskProblem& p,
              const std::vector<std::string>* task_ids) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "task_id,target";
  for (Eigen::Index j = 0; j < p.dim(); ++j) out << ",f" << j;
  out << "\n";
  for (Eigen::Index t = 0; t < p.task_count(); ++t) {
    const auto& task = p.tasks[static_cast<std::size_t>(t)];
    const std::string id = task_ids != nullptr ? (*task_ids)[static_cast<std::size_t>(t)]
                                               : "task" + std::to_string(t);
    for (Eigen::Index i = 0; i < task.rows(); ++i) {
      out << id << ',' << format_double(task.y[i]);
      for (Eigen::Index j = 0; j < task.dim(); ++j) out << ',' << format_double(task.X(i, j));
      out << "\n";
    }
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace srml::harness
