#include "srml/weights.hpp"

namespace srml {

SignMatrix sign_pattern(const WeightMatrix& w, double zero_tol) {
  SignMatrix s(w.rows(), w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) s(i, j) = sign_of(w(i, j), zero_tol);
  return s;
}

}  // namespace srml
