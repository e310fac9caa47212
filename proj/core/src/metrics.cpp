#include "srml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "srml/losses.hpp"

namespace srml::metrics {
namespace {

void check_lengths(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() == 0) {
    throw LengthMismatch("vector lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " are unusable");
  }
}

double truth_range(const Eigen::VectorXd& truth) {
  const double range = truth.maxCoeff() - truth.minCoeff();
  if (range <= 0.0) throw DegenerateRange("ground-truth labels have zero range");
  return range;
}

// Score-descending permutation; stable so equal scores keep input order.
std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& scores) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });
  return idx;
}

void check_both_classes(const Eigen::VectorXd& labels) {
  long pos = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) pos += labels[i] == 1.0 ? 1 : 0;
  if (pos == 0 || pos == labels.size()) {
    throw SingleClass("metric undefined: labels contain a single class");
  }
}

}  // namespace

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  check_lengths(pred, truth);
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  check_lengths(pred, truth);
  return (pred - truth).cwiseAbs().sum() / static_cast<double>(pred.size());
}

double msle(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  check_lengths(pred, truth);
  double total = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double p = std::log1p(std::max(pred[i], -1.0 + 1e-9));
    const double t = std::log1p(truth[i]);
    total += (p - t) * (p - t);
  }
  return total / static_cast<double>(pred.size());
}

double nmae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  return mae(pred, truth) / truth_range(truth);
}

double nmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  return mse(pred, truth) / truth_range(truth);
}

double accuracy(const Eigen::VectorXd& pred_labels, const Eigen::VectorXd& truth_labels) {
  check_lengths(pred_labels, truth_labels);
  long correct = 0;
  for (Eigen::Index i = 0; i < pred_labels.size(); ++i) {
    correct += pred_labels[i] == truth_labels[i] ? 1 : 0;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pred_labels.size());
}

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& truth_labels) {
  check_lengths(scores, truth_labels);
  check_both_classes(truth_labels);
  // Mann-Whitney: fraction of (positive, negative) pairs ranked correctly,
  // ties counting 1/2.
  double wins = 0.0;
  long pairs = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (truth_labels[i] != 1.0) continue;
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
      if (truth_labels[j] != 0.0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return 100.0 * wins / static_cast<double>(pairs);
}

double average_precision(const Eigen::VectorXd& scores, const Eigen::VectorXd& truth_labels) {
  check_lengths(scores, truth_labels);
  check_both_classes(truth_labels);
  const auto order = descending_order(scores);
  double ap = 0.0;
  long positives_seen = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (truth_labels[order[rank]] != 1.0) continue;
    ++positives_seen;
    ap += static_cast<double>(positives_seen) / static_cast<double>(rank + 1);
  }
  return 100.0 * ap / static_cast<double>(positives_seen);
}

SignMatchResult sign_match(const WeightMatrix& learned, const WeightMatrix& truth,
                           double zero_tol) {
  if (learned.rows() != truth.rows() || learned.cols() != truth.cols()) {
    throw ShapeMismatch("learned and truth weight matrices differ in shape");
  }
  SignMatchResult out;
  out.cells.resize(learned.rows(), learned.cols());
  long matches = 0;
  for (Eigen::Index t = 0; t < learned.cols(); ++t) {
    for (Eigen::Index j = 0; j < learned.rows(); ++j) {
      const int ls = sign_of(learned(j, t), zero_tol);
      const int ts = sign_of(truth(j, t), zero_tol);
      int cell = 0;
      if (ls > 0 && ts <= 0) cell = 1;
      else if (ls < 0 && ts >= 0) cell = -1;
      out.cells(j, t) = cell;
      matches += cell == 0 ? 1 : 0;
    }
  }
  out.match_rate = static_cast<double>(matches) / static_cast<double>(learned.size());
  return out;
}

std::map<std::string, double> evaluate(const MultiTaskProblem& p, const WeightMatrix& w) {
  std::map<std::string, double> agg;
  const Eigen::Index T = p.task_count();

  if (p.kind == ProblemKind::Regression) {
    // msle needs truth > -1 everywhere; omit it otherwise
    bool msle_defined = true;
    for (const auto& task : p.tasks) msle_defined = msle_defined && task.y.minCoeff() > -1.0;

    double s_mse = 0, s_mae = 0, s_msle = 0;
    for (Eigen::Index t = 0; t < T; ++t) {
      const auto& task = p.tasks[static_cast<std::size_t>(t)];
      const Eigen::VectorXd pred = task.X * w.col(t);
      s_mse += mse(pred, task.y);
      s_mae += mae(pred, task.y);
      if (msle_defined) s_msle += msle(pred, task.y);
    }
    agg["mse"] = s_mse / static_cast<double>(T);
    agg["mae"] = s_mae / static_cast<double>(T);
    if (msle_defined) agg["msle"] = s_msle / static_cast<double>(T);

    // Normalized errors use the global range of the evaluated split.
    double lo = p.tasks.front().y.minCoeff(), hi = p.tasks.front().y.maxCoeff();
    for (const auto& task : p.tasks) {
      lo = std::min(lo, task.y.minCoeff());
      hi = std::max(hi, task.y.maxCoeff());
    }
    if (hi > lo) {
      agg["nmae"] = agg["mae"] / (hi - lo);
      agg["nmse"] = agg["mse"] / (hi - lo);
    }
    return agg;
  }

  double s_acc = 0, s_auc = 0, s_map = 0;
  long ranked_tasks = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& task = p.tasks[static_cast<std::size_t>(t)];
    Eigen::VectorXd score = task.X * w.col(t);
    Eigen::VectorXd label(score.size());
    for (Eigen::Index i = 0; i < score.size(); ++i) {
      score[i] = sigmoid(score[i]);
      label[i] = score[i] >= 0.5 ? 1.0 : 0.0;
    }
    s_acc += accuracy(label, task.y);
    const bool two_classes = task.y.minCoeff() == 0.0 && task.y.maxCoeff() == 1.0;
    if (two_classes) {
      s_auc += auc(score, task.y);
      s_map += average_precision(score, task.y);
      ++ranked_tasks;
    }
  }
  agg["acc"] = s_acc / static_cast<double>(T);
  if (ranked_tasks > 0) {
    agg["auc"] = s_auc / static_cast<double>(ranked_tasks);
    agg["map"] = s_map / static_cast<double>(ranked_tasks);
  }
  return agg;
}

}  // namespace srml::metrics
