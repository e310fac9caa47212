#pragma once

#include <cstdint>
#include <string>

#include "srml/problem.hpp"
#include "srml/weights.hpp"

namespace srml::synth {

// Generator recipe: rows of X_t are N(0, I) plus a per-task feature bias
// with components uniform on [bias_lo, bias_hi); a shared sign vector P
// fixes each feature's polarity, per-task magnitudes are |N(0,1)|, and a
// fixed fraction of each task's weights gets its sign flipped.
struct SynthSpec {
  long T = 1;
  long m = 1;
  long d = 1;
  ProblemKind kind = ProblemKind::Regression;
  double flip_fraction = 0.1;
  double noise_sigma = 0.1;
  double bias_lo = 0.0;
  double bias_hi = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  Eigen::VectorXi P;  // length d, entries in {-1, +1} (0 has probability 0)
  WeightMatrix W;     // d x T true weights, flips included
};

struct SynthData {
  MultiTaskProblem problem;
  GroundTruth truth;
};

// Fully reproducible from spec.seed. Regression targets are X w + eps;
// classification labels are 1 iff sigmoid(x.w + eps) >= 0.5.
SynthData generate(const SynthSpec& spec);

// "synth1": T=20, m=100, d=25, regression
// "synth2": T=100, m=100, d=1000, regression
// "synth3": T=5, m=100, d=25, classification
SynthSpec preset(const std::string& name);

// floor(flip_fraction * d), the exact per-task flip count.
long flip_count(const SynthSpec& spec);

}  // namespace srml::synth
