#include "srml/synth.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "srml/losses.hpp"
#include "srml/rng.hpp"

namespace srml::synth {

void SynthSpec::validate() const {
  if (T < 1 || m < 1 || d < 1) throw std::invalid_argument("T, m, d must be >= 1");
  if (flip_fraction < 0.0 || flip_fraction > 1.0)
    throw std::invalid_argument("flip_fraction must be in [0,1]");
  if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
  if (bias_hi < bias_lo) throw std::invalid_argument("bias range is inverted");
}

long flip_count(const SynthSpec& spec) {
  return static_cast<long>(std::floor(spec.flip_fraction * static_cast<double>(spec.d)));
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const Eigen::Index d = spec.d;
  const Eigen::Index T = spec.T;
  const Eigen::Index m = spec.m;

  // Shared feature polarity; a draw of exactly 0 maps to +1.
  Eigen::VectorXi P(d);
  for (Eigen::Index j = 0; j < d; ++j) P[j] = rng.normal() < 0.0 ? -1 : 1;

  SynthData out;
  out.truth.P = P;
  out.truth.W.resize(d, T);
  out.problem.kind = spec.kind;
  out.problem.tasks.reserve(static_cast<std::size_t>(T));

  const long flips = flip_count(spec);
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(d));

  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXd w(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      w[j] = static_cast<double>(P[j]) * std::abs(rng.normal());
    }
    // Flip the sign of exactly `flips` distinct entries.
    std::iota(indices.begin(), indices.end(), Eigen::Index{0});
    rng.shuffle(indices);
    for (long f = 0; f < flips; ++f) w[indices[static_cast<std::size_t>(f)]] *= -1.0;
    out.truth.W.col(t) = w;

    Eigen::VectorXd bias(d);
    for (Eigen::Index j = 0; j < d; ++j) bias[j] = rng.uniform(spec.bias_lo, spec.bias_hi);

    TaskData task;
    task.X.resize(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) task.X(i, j) = rng.normal() + bias[j];
    }

    Eigen::VectorXd noise(m);
    for (Eigen::Index i = 0; i < m; ++i) noise[i] = spec.noise_sigma * rng.normal();

    const Eigen::VectorXd signal = task.X * w + noise;
    if (spec.kind == ProblemKind::Regression) {
      task.y = signal;
    } else {
      task.y.resize(m);
      for (Eigen::Index i = 0; i < m; ++i) task.y[i] = sigmoid(signal[i]) >= 0.5 ? 1.0 : 0.0;
    }
    out.problem.tasks.push_back(std::move(task));
  }
  return out;
}

SynthSpec preset(const std::string& name) {
  SynthSpec s;
  if (name == "synth1") {
    s.T = 20;
    s.m = 100;
    s.d = 25;
    s.kind = ProblemKind::Regression;
  } else if (name == "synth2") {
    s.T = 100;
    s.m = 100;
    s.d = 1000;
    s.kind = ProblemKind::Regression;
  } else if (name == "synth3") {
    s.T = 5;
    s.m = 100;
    s.d = 25;
    s.kind = ProblemKind::Classification;
  } else {
    throw UnknownPreset("unknown synthetic preset: " + name);
  }
  return s;
}

}  // namespace srml::synth
