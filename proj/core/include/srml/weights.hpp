#pragma once

#include <Eigen/Dense>

namespace srml {

// d x T dense weights; column t holds the weight vector of task t. The same
// layout is reused for the primal w, the mirror u and the scaled dual y.
using WeightMatrix = Eigen::MatrixXd;

// Entries in {-1, 0, +1}; sign(0) = 0 so a zero weight never counts as a
// sign conflict.
using SignMatrix = Eigen::MatrixXi;

// Entry is 0 iff |w(i,j)| <= zero_tol, otherwise the sign of w(i,j).
SignMatrix sign_pattern(const WeightMatrix& w, double zero_tol = 0.0);

inline int sign_of(double v, double zero_tol = 0.0) {
  if (v > zero_tol) return 1;
  if (v < -zero_tol) return -1;
  return 0;
}

}  // namespace srml
