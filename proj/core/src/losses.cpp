#include "srml/losses.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace srml {
namespace {

constexpr double kSigmoidClamp = 30.0;
constexpr double kLogFloor = 1e-12;

// Largest eigenvalue of X^T X via power iteration on v -> X^T (X v).
// Falls back to a dense eigendecomposition for small d if the iteration
// fails to settle within max_iters.
double xtx_spectral_norm(const Eigen::MatrixXd& X) {
  const Eigen::Index d = X.cols();
  if (d == 1) return X.col(0).squaredNorm();

  std::mt19937_64 engine(12345);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    v[i] = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
  }
  v.normalize();

  constexpr int max_iters = 1000;
  constexpr double tol = 1e-9;
  double eig = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd av = X.transpose() * (X * v);
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;  // X v in the null space; X is rank deficient
    av /= norm;
    const double eig_new = (X * av).squaredNorm();
    if (std::abs(eig_new - eig) <= tol * std::max(1.0, eig_new)) return eig_new;
    eig = eig_new;
    v.swap(av);
  }
  if (d <= 64) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X.transpose() * X);
    return es.eigenvalues().maxCoeff();
  }
  return eig;
}

}  // namespace

double sigmoid(double z) {
  z = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
  return 1.0 / (1.0 + std::exp(-z));
}

double squared_loss(const TaskData& t, const Eigen::VectorXd& w) {
  return (t.y - t.X * w).squaredNorm();
}

Eigen::VectorXd squared_loss_grad(const TaskData& t, const Eigen::VectorXd& w) {
  return 2.0 * (t.X.transpose() * (t.X * w - t.y));
}

double logistic_loss(const TaskData& t, const Eigen::VectorXd& w) {
  const Eigen::VectorXd z = t.X * w;
  const double m = static_cast<double>(t.rows());
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double p = sigmoid(z[i]);
    total -= t.y[i] * std::log(std::max(p, kLogFloor));
    total -= (1.0 - t.y[i]) * std::log(std::max(1.0 - p, kLogFloor));
  }
  return total / m;
}

Eigen::VectorXd logistic_loss_grad(const TaskData& t, const Eigen::VectorXd& w) {
  const Eigen::VectorXd z = t.X * w;
  Eigen::VectorXd r(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) r[i] = sigmoid(z[i]) - t.y[i];
  return t.X.transpose() * r / static_cast<double>(t.rows());
}

double loss_value(LossKind kind, const TaskData& t, const Eigen::VectorXd& w) {
  return kind == LossKind::Squared ? squared_loss(t, w) : logistic_loss(t, w);
}

Eigen::VectorXd loss_grad(LossKind kind, const TaskData& t, const Eigen::VectorXd& w) {
  return kind == LossKind::Squared ? squared_loss_grad(t, w) : logistic_loss_grad(t, w);
}

double task_lipschitz(LossKind kind, const TaskData& t) {
  if (kind == LossKind::Squared) return 2.0 * xtx_spectral_norm(t.X);
  return t.X.rowwise().squaredNorm().sum() / static_cast<double>(t.rows());
}

double lipschitz_H(const MultiTaskProblem& p, LossKind kind) {
  double h = 0.0;
  for (const auto& t : p.tasks) h = std::max(h, task_lipschitz(kind, t));
  return h;
}

double lipschitz_H(const MultiTaskProblem& p) { return lipschitz_H(p, default_loss(p.kind)); }

}  // namespace srml
