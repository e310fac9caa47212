#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "srml/baselines.hpp"
#include "srml/metrics.hpp"
#include "srml/solver.hpp"
#include "srml/synth.hpp"
#include "test_util.hpp"

using namespace srml;

namespace {

MultiTaskProblem small_regression(unsigned seed, Eigen::Index T = 3, Eigen::Index m = 20,
                                  Eigen::Index d = 4) {
  test::Random rnd(seed);
  return rnd.regression_problem(T, m, d);
}

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("objective at zero weights is the bare loss sum") {
  MultiTaskProblem p = small_regression(41);
  SolverConfig cfg;
  cfg.lambda = 7.0;
  cfg.c = 3.0;
  const WeightMatrix zero = WeightMatrix::Zero(4, 3);
  double expected = 0.0;
  for (const auto& t : p.tasks) expected += t.y.squaredNorm();
  CHECK(objective_value(p, LossKind::Squared, cfg, zero, zero) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("same-sign mirror columns contribute no slack") {
  MultiTaskProblem p = small_regression(42);
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.c = 100.0;
  test::Random rnd(43);
  const WeightMatrix w = rnd.matrix(4, 3);
  const WeightMatrix u = w.cwiseAbs();  // all positive, no sign conflicts
  SolverConfig no_slack = cfg;
  no_slack.c = 0.0;
  CHECK(objective_value(p, LossKind::Squared, cfg, w, u) ==
        objective_value(p, LossKind::Squared, no_slack, w, u));
}

TEST_CASE("objective equals a term-by-term oracle") {
  MultiTaskProblem p = small_regression(44);
  SolverConfig cfg;
  cfg.lambda = 0.9;
  cfg.c = 1.7;
  cfg.reg_kind = RegKind::L1;
  test::Random rnd(45);
  const WeightMatrix w = rnd.matrix(4, 3);
  const WeightMatrix u = rnd.matrix(4, 3);

  double expected = 0.0;
  for (Eigen::Index t = 0; t < 3; ++t) {
    expected += (p.tasks[static_cast<std::size_t>(t)].y -
                 p.tasks[static_cast<std::size_t>(t)].X * w.col(t))
                    .squaredNorm();
    expected += cfg.lambda * w.col(t).cwiseAbs().sum();
  }
  for (Eigen::Index t = 0; t + 1 < 3; ++t) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      expected += cfg.c * std::max(0.0, -u(j, t) * u(j, t + 1));
    }
  }
  CHECK(objective_value(p, LossKind::Squared, cfg, w, u) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("residuals on a hand-built state") {
  SolverState s;
  s.rho = 2.0;
  s.w.resize(2, 2);
  s.w << 1, 0, 0, 0;
  s.u = WeightMatrix::Zero(2, 2);
  s.u_prev.resize(2, 2);
  s.u_prev << 0, -1, 0, 0;
  const auto [primal, dual] = residuals(s);
  CHECK(primal == doctest::Approx(1.0));
  CHECK(dual == doctest::Approx(2.0));

  s.u = s.w;  // w == u
  CHECK(residuals(s).first == 0.0);
  s.u_prev = s.u;  // unchanged mirror
  CHECK(residuals(s).second == 0.0);
}

TEST_CASE("vk update keeps the running minimum") {
  SolverState s;
  s.w = WeightMatrix::Zero(2, 1);
  s.w_prev = s.w;
  s.u = s.w;
  s.u_prev = s.w;
  CHECK(update_vk(s) == 0.0);
  CHECK(update_vk(s) == 0.0);

  s.vk_history = {4.0, 1.0};
  s.w_prev(0, 0) = std::sqrt(2.0);  // raw change = 2
  CHECK(update_vk(s) == doctest::Approx(1.0));
  CHECK(s.vk_history.back() == doctest::Approx(1.0));
}

TEST_CASE("dual update identity holds exactly every iteration") {
  synth::SynthSpec spec;
  spec.T = 4;
  spec.m = 15;
  spec.d = 3;
  spec.seed = 9;
  auto data = synth::generate(spec);
  SolverConfig cfg;
  cfg.lambda = 0.05;
  cfg.c = 0.5;
  cfg.rho = 0.3;
  cfg.max_outer_iters = 50;
  int iterations_seen = 0;
  (void)fit(data.problem, LossKind::Squared, cfg, std::nullopt, [&](const SolverState& s) {
    ++iterations_seen;
    const Eigen::MatrixXd expected = s.rho * (s.w - s.u);
    REQUIRE((s.last_dual_step - expected).cwiseAbs().maxCoeff() == 0.0);
  });
  CHECK(iterations_seen > 0);
}

TEST_CASE("vk history is nonincreasing over a run") {
  synth::SynthSpec spec;
  spec.T = 3;
  spec.m = 15;
  spec.d = 4;
  spec.seed = 10;
  auto data = synth::generate(spec);
  SolverConfig cfg;
  cfg.c = 0.3;
  cfg.rho = 0.2;
  cfg.max_outer_iters = 80;
  std::vector<double> vks;
  (void)fit(data.problem, LossKind::Squared, cfg, std::nullopt,
            [&](const SolverState& s) { vks.push_back(s.vk_history.back()); });
  for (std::size_t i = 1; i < vks.size(); ++i) REQUIRE(vks[i] <= vks[i - 1]);
}

TEST_CASE("c = 0 with L2 reduces to per-task ridge") {
  for (unsigned seed : {50u, 51u}) {
    MultiTaskProblem p = small_regression(seed, 4, 25, 5);
    SolverConfig cfg;
    cfg.lambda = 0.8;
    cfg.c = 0.0;
    cfg.rho = 0.1;
    cfg.primal_tol = 1e-7;
    cfg.dual_tol = 1e-7;
    cfg.max_outer_iters = 2000;
    cfg.max_inner_iters = 5000;
    const FitResult res = fit(p, LossKind::Squared, cfg);
    const WeightMatrix ridge = baselines::fit_independent(p, LossKind::Squared,
                                                          baselines::IndependentKind::Ridge, 0.8);
    const double rms =
        std::sqrt((res.weights - ridge).squaredNorm() / static_cast<double>(ridge.size()));
    CHECK(rms <= 1e-4);
  }
}

TEST_CASE("identical tasks converge to identical weights") {
  test::Random rnd(52);
  TaskData t = rnd.task(20, 4);
  MultiTaskProblem p;
  p.tasks = {t, t};
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.c = 1.0;
  cfg.rho = 0.5;
  cfg.primal_tol = 1e-8;
  cfg.dual_tol = 1e-8;
  cfg.max_outer_iters = 5000;
  cfg.max_inner_iters = 5000;
  const FitResult res = fit(p, LossKind::Squared, cfg);
  CHECK((res.weights.col(0) - res.weights.col(1)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("fit is deterministic") {
  synth::SynthSpec spec;
  spec.T = 3;
  spec.m = 12;
  spec.d = 3;
  spec.seed = 77;
  auto data = synth::generate(spec);
  SolverConfig cfg;
  cfg.c = 0.4;
  cfg.rho = 0.2;
  cfg.max_outer_iters = 60;
  const FitResult a = fit(data.problem, LossKind::Squared, cfg);
  const FitResult b = fit(data.problem, LossKind::Squared, cfg);
  CHECK(a.weights == b.weights);
  CHECK(a.mirror == b.mirror);
  CHECK(a.dual == b.dual);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("large c yields a feasible mirror at convergence") {
  synth::SynthSpec spec;
  spec.T = 4;
  spec.m = 30;
  spec.d = 5;
  spec.seed = 13;
  spec.flip_fraction = 0.2;
  auto data = synth::generate(spec);
  SolverConfig cfg;
  cfg.lambda = 0.01;
  cfg.c = 1e3;
  cfg.rho = 0.5;
  cfg.closed_form_w = true;
  cfg.primal_tol = 1e-6;
  cfg.dual_tol = 1e-6;
  cfg.max_outer_iters = 20000;
  const FitResult res = fit(data.problem, LossKind::Squared, cfg);
  for (Eigen::Index t = 0; t + 1 < res.mirror.cols(); ++t) {
    for (Eigen::Index j = 0; j < res.mirror.rows(); ++j) {
      REQUIRE(res.mirror(j, t) * res.mirror(j, t + 1) >= -1e-8);
    }
  }
}

TEST_CASE("an explicit initialization is honored and shape-checked") {
  MultiTaskProblem p = small_regression(56);
  SolverConfig cfg;
  cfg.c = 0.2;
  cfg.rho = 0.3;
  cfg.max_outer_iters = 30;
  test::Random rnd(57);
  const WeightMatrix init = rnd.matrix(4, 3);
  const FitResult a = fit(p, LossKind::Squared, cfg, init);
  const FitResult b = fit(p, LossKind::Squared, cfg, init);
  CHECK(a.weights == b.weights);

  const WeightMatrix wrong = rnd.matrix(2, 3);
  CHECK_THROWS_AS((void)fit(p, LossKind::Squared, cfg, wrong), std::invalid_argument);
}

TEST_CASE("hitting the iteration cap is a soft outcome") {
  MultiTaskProblem p = small_regression(53);
  SolverConfig cfg;
  cfg.c = 0.5;
  cfg.rho = 0.1;
  cfg.max_outer_iters = 1;
  const FitResult res = fit(p, LossKind::Squared, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.weights.allFinite());
}

TEST_CASE("rho policy derives margin times twice the Lipschitz constant") {
  MultiTaskProblem p = small_regression(54);
  SolverConfig cfg;
  cfg.rho_policy = RhoPolicy::FromLipschitz;
  cfg.rho_margin = 1.25;
  cfg.max_outer_iters = 2;
  const FitResult res = fit(p, LossKind::Squared, cfg);
  CHECK(res.effective_rho ==
        doctest::Approx(1.25 * 2.0 * lipschitz_H(p, LossKind::Squared)));
}

TEST_CASE("mismatched loss and problem kind is rejected") {
  MultiTaskProblem p = small_regression(55);
  SolverConfig cfg;
  CHECK_THROWS_AS((void)fit(p, LossKind::Logistic, cfg), std::invalid_argument);
}

TEST_CASE("L1 fits converge and zero out noise features") {
  // half the features carry no signal; the L1 path should null most of them
  test::Random rnd(58);
  const Eigen::Index T = 3, m = 60, d = 10, active = 5;
  MultiTaskProblem p;
  WeightMatrix truth = WeightMatrix::Zero(d, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index j = 0; j < active; ++j) truth(j, t) = (j % 2 == 0 ? 1.5 : -1.5);
    TaskData task;
    task.X = rnd.matrix(m, d);
    task.y = task.X * truth.col(t);
    for (Eigen::Index i = 0; i < m; ++i) task.y[i] += 0.05 * rnd.normal();
    p.tasks.push_back(std::move(task));
  }
  SolverConfig cfg;
  cfg.lambda = 8.0;
  cfg.c = 0.1;
  cfg.reg_kind = RegKind::L1;
  cfg.rho = 0.5;
  cfg.max_outer_iters = 1000;
  cfg.max_inner_iters = 2000;
  const FitResult res = fit(p, LossKind::Squared, cfg);
  CHECK(res.converged);
  long zeroed = 0, active_kept = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j >= active && std::abs(res.weights(j, t)) <= 1e-3) ++zeroed;
      if (j < active && std::abs(res.weights(j, t)) > 0.5) ++active_kept;
    }
  }
  CHECK(zeroed >= (d - active) * T - 2);  // nearly all noise features nulled
  CHECK(active_kept == active * T);
  CHECK(metrics::sign_match(res.weights, truth).match_rate >= 0.9);
}

TEST_CASE("sign recovery on a small flipped-sign dataset") {
  synth::SynthSpec spec;
  spec.T = 6;
  spec.m = 60;
  spec.d = 10;
  spec.seed = 3;
  auto data = synth::generate(spec);
  SolverConfig cfg;
  cfg.lambda = 0.01;
  cfg.c = 0.1;
  cfg.rho = 0.1;
  cfg.closed_form_w = true;
  cfg.max_outer_iters = 500;
  const FitResult res = fit(data.problem, LossKind::Squared, cfg);
  const auto match = metrics::sign_match(res.weights, data.truth.W);
  CHECK(match.match_rate >= 0.9);
}

TEST_SUITE_END();
