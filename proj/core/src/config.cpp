#include "srml/config.hpp"

#include <stdexcept>

namespace srml {

void SolverConfig::validate() const {
  if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (c < 0) throw std::invalid_argument("c must be >= 0");
  if (rho <= 0) throw std::invalid_argument("rho must be > 0");
  if (primal_tol <= 0 || dual_tol <= 0) throw std::invalid_argument("tolerances must be > 0");
  if (max_outer_iters < 1 || max_inner_iters < 1)
    throw std::invalid_argument("iteration limits must be >= 1");
  if (inner_step_size && *inner_step_size <= 0)
    throw std::invalid_argument("inner_step_size must be > 0");
  if (rho_policy == RhoPolicy::FromLipschitz && rho_margin <= 1.0)
    throw std::invalid_argument("rho_margin must be > 1");
}

}  // namespace srml
