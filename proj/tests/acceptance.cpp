// Acceptance suite: end-to-end checks of the solver, theory calculators,
// generators and harness. Each criterion prints one PASS/FAIL/SKIP line;
// the process exits nonzero if any non-skipped criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "srml/baselines.hpp"
#include "srml/dataset_io.hpp"
#include "srml/experiment.hpp"
#include "srml/losses.hpp"
#include "srml/metrics.hpp"
#include "srml/model_io.hpp"
#include "srml/rng.hpp"
#include "srml/solver.hpp"
#include "srml/subproblems.hpp"
#include "srml/synth.hpp"
#include "srml/theory.hpp"

using namespace srml;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int id;
  std::string name;
  int status;  // 0 pass, 1 fail, 2 skip
  std::string detail;
};

std::vector<Outcome> g_results;
bool g_synth1_vk_ok = true;  // feeds criterion 6 (vk must not increase on any run)

void record(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass ? 0 : 1, detail});
  std::printf("[%s] criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

void record_skip(int id, const std::string& name, const std::string& detail) {
  g_results.push_back({id, name, 2, detail});
  std::printf("[SKIP] criterion %2d: %-28s %s\n", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2: sign recovery and test-error ordering on the flipped-sign
// regression benchmark, with hyperparameters chosen by 5-fold CV per seed.

struct BenchmarkRun {
  double srml_mse = 0, ridge_mse = 0, ssml_mse = 0, floor_mse = 0;
  double match = 0, ssml_match = 0;
  std::vector<TraceRow> trace;
};

BenchmarkRun run_synth1_seed(std::uint64_t seed) {
  synth::SynthSpec spec = synth::preset("synth1");
  spec.seed = seed;
  const auto data = synth::generate(spec);
  const auto sp = harness::split(data.problem, 0.6, Rng::mix(seed, 1));

  harness::ExperimentConfig config;
  config.data.preset = "synth1";
  config.solver.reg_kind = RegKind::L2;
  config.solver.rho = 0.1;
  config.solver.closed_form_w = true;
  config.solver.max_outer_iters = 300;

  const auto cv = harness::cv_grid_search(sp.train, LossKind::Squared, config, Rng::mix(seed, 2));
  SolverConfig cfg = config.solver;
  cfg.lambda = cv.best_lambda;
  cfg.c = cv.best_c;
  cfg.primal_tol = 1e-6;
  cfg.dual_tol = 1e-6;
  cfg.max_outer_iters = 3000;
  const FitResult res = fit(sp.train, LossKind::Squared, cfg);

  BenchmarkRun out;
  out.trace = res.trace;
  out.srml_mse = metrics::evaluate(sp.test, res.weights).at("mse");
  out.match = metrics::sign_match(res.weights, data.truth.W).match_rate;

  // independent per-task ridge, lambda chosen by the same CV protocol
  const auto folds = harness::make_folds(sp.train, config.cv_folds, Rng::mix(seed, 2));
  double ridge_lambda = config.lambda_grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (const double lambda : config.lambda_grid) {
    double total = 0;
    for (const auto& fold : folds) {
      const WeightMatrix w = baselines::fit_independent(
          fold.fit, LossKind::Squared, baselines::IndependentKind::Ridge, lambda);
      total += metrics::evaluate(fold.val, w).at("mse");
    }
    total /= static_cast<double>(folds.size());
    if (total < best_score || (total == best_score && lambda > ridge_lambda)) {
      best_score = total;
      ridge_lambda = lambda;
    }
  }
  const WeightMatrix ridge = baselines::fit_independent(
      sp.train, LossKind::Squared, baselines::IndependentKind::Ridge, ridge_lambda);
  out.ridge_mse = metrics::evaluate(sp.test, ridge).at("mse");

  const auto ssml = baselines::fit_ssml(sp.train, LossKind::Squared, cfg);
  out.ssml_mse = metrics::evaluate(sp.test, ssml.fit.weights).at("mse");
  out.ssml_match = metrics::sign_match(ssml.fit.weights, data.truth.W).match_rate;

  out.floor_mse = metrics::evaluate(sp.test, data.truth.W).at("mse");
  return out;
}

bool vk_nonincreasing(const std::vector<TraceRow>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].vk > trace[i - 1].vk) return false;
  }
  return true;
}

void criteria_1_and_2() {
  constexpr int kSeeds = 5;
  std::vector<BenchmarkRun> runs;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) runs.push_back(run_synth1_seed(seed));

  int match_ok = 0, ssml_strictly_lower = 0, ordering_ok = 0, floor_ok = 0;
  double worst_match = 1.0;
  for (const auto& run : runs) {
    match_ok += run.match >= 0.95 ? 1 : 0;
    ssml_strictly_lower += run.ssml_match < run.match ? 1 : 0;
    ordering_ok += (run.srml_mse < run.ssml_mse && run.srml_mse < run.ridge_mse) ? 1 : 0;
    floor_ok += run.srml_mse <= 10.0 * run.floor_mse ? 1 : 0;
    g_synth1_vk_ok = g_synth1_vk_ok && vk_nonincreasing(run.trace);
    worst_match = std::min(worst_match, run.match);
  }

  {
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "match>=0.95 on %d/5 seeds (min %.3f), strict fit lower on %d/5", match_ok,
                  worst_match, ssml_strictly_lower);
    record(1, "sign recovery", match_ok == kSeeds && ssml_strictly_lower == kSeeds, detail);
  }
  {
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "beats strict+ridge on %d/5 seeds (need >=4), <=10x noise floor on %d/5",
                  ordering_ok, floor_ok);
    record(2, "test-error ordering", ordering_ok >= 4 && floor_ok == kSeeds, detail);
  }
}

// ---------------------------------------------------------------------------
// Criterion 3: the analytic scalar solve never loses to a fine grid.

double hinge_objective(const UScalarInstance& inst, double u) {
  double f = -inst.y_dual * u + 0.5 * inst.rho * (inst.w_target - u) * (inst.w_target - u);
  for (int i = 0; i < inst.neighbor_count; ++i) {
    const double prod = -u * inst.neighbors[static_cast<std::size_t>(i)];
    if (prod > 0.0) f += inst.c * prod;
  }
  return f;
}

void criterion_3() {
  std::mt19937_64 engine(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * unit(engine));
  };
  auto signed_mag = [&](double lo, double hi) {
    return (unit(engine) < 0.5 ? -1.0 : 1.0) * log_uniform(lo, hi);
  };

  int failures = 0;
  double worst_gap = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    UScalarInstance inst;
    inst.w_target = signed_mag(1e-3, 5.0);
    inst.y_dual = signed_mag(1e-3, 2.0);
    inst.rho = log_uniform(1e-2, 1e2);
    inst.c = log_uniform(1e-3, 1e2);
    inst.neighbor_count = rep % 3;
    for (int n = 0; n < inst.neighbor_count; ++n) {
      inst.neighbors[static_cast<std::size_t>(n)] = signed_mag(1e-3, 5.0);
    }
    const double analytic = hinge_objective(inst, solve_u_scalar(inst));
    double grid_best = hinge_objective(inst, -10.0);
    for (double u = -10.0 + 1e-4; u <= 10.0; u += 1e-4) {
      grid_best = std::min(grid_best, hinge_objective(inst, u));
    }
    worst_gap = std::max(worst_gap, analytic - grid_best);
    if (analytic > grid_best + 1e-6) ++failures;
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail), "1000 instances, failures %d, worst analytic-grid gap %.2e",
                failures, worst_gap);
  record(3, "u-subproblem oracle", failures == 0, detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: analytic gradients vs central finite differences.

void criterion_4() {
  std::mt19937_64 engine(4321);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_task = [&](Eigen::Index m, Eigen::Index d, bool binary) {
    TaskData t;
    t.X.resize(m, d);
    t.y.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) t.X(i, j) = gauss(engine);
      t.y[i] = binary ? (gauss(engine) > 0 ? 1.0 : 0.0) : gauss(engine);
    }
    return t;
  };

  const double h = 1e-6;
  int failures = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    for (const bool logistic : {false, true}) {
      const TaskData t = random_task(6 + rep % 5, 3 + rep % 3, logistic);
      Eigen::VectorXd w(t.dim());
      for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = gauss(engine);

      auto value = [&](const Eigen::VectorXd& v) {
        return logistic ? logistic_loss(t, v) : squared_loss(t, v);
      };
      const Eigen::VectorXd g =
          logistic ? logistic_loss_grad(t, w) : squared_loss_grad(t, w);
      Eigen::VectorXd fd(w.size());
      Eigen::VectorXd probe = w;
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        probe[j] = w[j] + h;
        const double up = value(probe);
        probe[j] = w[j] - h;
        const double down = value(probe);
        probe[j] = w[j];
        fd[j] = (up - down) / (2.0 * h);
      }
      const double rel = (g - fd).norm() / std::max(1.0, g.norm());
      worst = std::max(worst, rel);
      if (rel > 1e-5) ++failures;
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail), "200 gradient checks, failures %d, worst rel err %.2e",
                failures, worst);
  record(4, "gradient correctness", failures == 0, detail);
}

// ---------------------------------------------------------------------------
// Criteria 5 and 6: residual convergence under rho = 2.5 H and the decay of
// the running-minimum iterate change.

void criteria_5_and_6() {
  constexpr int kSeeds = 5;
  int converged_in_time = 0, settled = 0, identity_ok = 0;
  bool vk_ok = true, kv_ok = true;
  int min_iters = 1 << 30;

  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    synth::SynthSpec spec = synth::preset("synth3");
    spec.seed = seed;
    const auto data = synth::generate(spec);

    SolverConfig cfg;
    cfg.lambda = 7.0;  // strong convexity keeps the prox-point steps moving
    cfg.c = 0.1;
    cfg.reg_kind = RegKind::L2;
    cfg.rho_policy = RhoPolicy::FromLipschitz;
    cfg.rho_margin = 1.25;  // effective rho = 2.5 H_class
    cfg.primal_tol = 1e-4;
    cfg.dual_tol = 1e-4;
    cfg.max_outer_iters = 2000;

    bool identity_exact = true;
    const FitResult res =
        fit(data.problem, LossKind::Logistic, cfg, std::nullopt, [&](const SolverState& s) {
          const Eigen::MatrixXd expected = s.rho * (s.w - s.u);
          if ((s.last_dual_step - expected).cwiseAbs().maxCoeff() != 0.0) identity_exact = false;
        });

    const auto& trace = res.trace;
    const bool in_time = res.converged && res.iterations <= 2000;
    converged_in_time += in_time ? 1 : 0;
    identity_ok += identity_exact ? 1 : 0;
    min_iters = std::min(min_iters, res.iterations);

    bool obj_settled = trace.size() >= 11;
    for (std::size_t i = trace.size() - 10; obj_settled && i < trace.size(); ++i) {
      const double rel = std::abs(trace[i].objective - trace[i - 1].objective) /
                         std::max(1e-300, std::abs(trace[i - 1].objective));
      obj_settled = rel <= 1e-6;
    }
    settled += obj_settled ? 1 : 0;

    vk_ok = vk_ok && vk_nonincreasing(trace);
    if (trace.size() >= 800) {
      // k * v^k sampled at k in {100, 200, 400, 800} must not increase
      double prev = 100.0 * trace[99].vk;
      for (const int k : {200, 400, 800}) {
        const double cur = k * trace[static_cast<std::size_t>(k - 1)].vk;
        kv_ok = kv_ok && cur <= prev;
        prev = cur;
      }
    } else {
      kv_ok = false;  // converged before the k = 800 checkpoint
    }
  }

  {
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "residuals<1e-4 within 2000 iters on %d/5 seeds (min iters %d), objective "
                  "settled on %d/5, dual identity exact on %d/5",
                  converged_in_time, min_iters, settled, identity_ok);
    record(5, "residual convergence", converged_in_time == kSeeds && settled == kSeeds &&
                                          identity_ok == kSeeds,
           detail);
  }
  {
    const bool all_traces_ok = vk_ok && g_synth1_vk_ok;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "vk nonincreasing on all runs %s, k*vk at k in {100,200,400,800} nonincreasing %s",
                  all_traces_ok ? "yes" : "NO", kv_ok ? "yes" : "NO");
    record(6, "vk decay", all_traces_ok && kv_ok, detail);
  }
}

// ---------------------------------------------------------------------------
// Criterion 7: with the coupling off, the solver reproduces per-task ridge.

void criterion_7() {
  std::mt19937_64 engine(777);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int ok = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    MultiTaskProblem p;
    const Eigen::Index T = 3 + rep % 3, m = 25, d = 5;
    for (Eigen::Index t = 0; t < T; ++t) {
      TaskData task;
      task.X.resize(m, d);
      task.y.resize(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) task.X(i, j) = gauss(engine);
        task.y[i] = gauss(engine);
      }
      p.tasks.push_back(std::move(task));
    }
    const double lambda = 0.5;
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.c = 0.0;
    cfg.rho = 0.1;
    cfg.primal_tol = 1e-7;
    cfg.dual_tol = 1e-7;
    cfg.max_outer_iters = 2000;
    cfg.max_inner_iters = 5000;
    const FitResult res = fit(p, LossKind::Squared, cfg);

    // independent normal-equation oracle
    WeightMatrix oracle(d, T);
    for (Eigen::Index t = 0; t < T; ++t) {
      const auto& task = p.tasks[static_cast<std::size_t>(t)];
      Eigen::MatrixXd A = task.X.transpose() * task.X;
      A.diagonal().array() += lambda;
      oracle.col(t) = A.ldlt().solve(task.X.transpose() * task.y);
    }
    const double rms =
        std::sqrt((res.weights - oracle).squaredNorm() / static_cast<double>(oracle.size()));
    worst = std::max(worst, rms);
    ok += rms <= 1e-4 ? 1 : 0;
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d/10 seeds within 1e-4 RMS of ridge (worst %.2e)", ok,
                worst);
  record(7, "ridge reduction", ok == 10, detail);
}

// ---------------------------------------------------------------------------
// Criterion 8: theory-module properties.

void criterion_8() {
  std::mt19937_64 engine(888);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  int monotone = 0;
  for (int rep = 0; rep < 100; ++rep) {
    theory::BoundInputs b;
    b.lipschitz_L = std::exp(4.0 * unit(engine) - 2.0);
    b.alpha = std::exp(5.0 * unit(engine) - 2.0);
    b.epsilon = 0.01 + 0.5 * unit(engine);
    b.m = 1 + static_cast<long>(499 * unit(engine));
    b.T = 1 + static_cast<long>(49 * unit(engine));
    const double x_norm = std::exp(5.0 * unit(engine) - 1.0);
    theory::BoundInputs doubled = b;
    doubled.m *= 2;
    monotone += theory::generalization_bound(doubled, x_norm) <
                        theory::generalization_bound(b, x_norm)
                    ? 1
                    : 0;
  }

  int agree = 0, total = 0, held = 0;
  for (int rep = 0; rep < 500; ++rep) {
    MultiTaskProblem p;
    const Eigen::Index T = 1 + rep % 4;
    const Eigen::Index m = 2 + rep % 11;
    const Eigen::Index d = 1 + rep % 6;
    for (Eigen::Index t = 0; t < T; ++t) {
      TaskData task;
      task.X.resize(m, d);
      task.y = Eigen::VectorXd::Zero(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) task.X(i, j) = gauss(engine);
      }
      p.tasks.push_back(std::move(task));
    }
    bool a2 = false;
    try {
      a2 = theory::assumption2_holds(p);
    } catch (const NonUniqueMaximizer&) {
      continue;
    }
    ++total;
    const auto terms = theory::rademacher_bound_terms(p, 1.0);
    const bool tight_is_tighter = terms.tight < terms.loose;
    if (a2 == tight_is_tighter) ++agree;
    if (a2) ++held;
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "bound decreased on %d/100 m-doublings; biconditional %d/%d (condition held on %d)",
                monotone, agree, total, held);
  record(8, "generalization bound", monotone == 100 && agree == total && held > 20 &&
                                        held < total,
         detail);
}

// ---------------------------------------------------------------------------
// Criterion 9: runtime scales near-linearly in the per-task sample count.

void criterion_9() {
  synth::SynthSpec base;
  base.T = 5;
  base.d = 10;
  base.seed = 99;

  SolverConfig solver;  // gradient-descent path, fixed iteration budget
  solver.lambda = 0.01;
  solver.c = 0.1;
  solver.rho = 0.1;
  solver.max_outer_iters = 20;
  solver.max_inner_iters = 50;
  solver.primal_tol = 1e-12;
  solver.dual_tol = 1e-12;

  const auto result = harness::scale_sweep(harness::ScaleAxis::M, {100, 200, 400, 800}, base,
                                           solver, LossKind::Squared, 10);
  const double slope = result.loglog_slope;
  char detail[120];
  std::snprintf(detail, sizeof(detail), "log-log slope over m in {100..800}: %.3f (band [0.6,1.6])",
                slope);
  record(9, "sample-count scaling", slope >= 0.6 && slope <= 1.6, detail);
}

// ---------------------------------------------------------------------------
// Criterion 10: optional real-data sanity check on an exam-score table.

void criterion_10() {
  std::string path = "school.csv";
  if (const char* env = std::getenv("SRML_SCHOOL_CSV")) path = env;
  if (!fs::exists(path)) {
    record_skip(10, "real-data sanity", "no school CSV present (set SRML_SCHOOL_CSV to enable)");
    return;
  }
  harness::ExperimentConfig config;
  config.data.csv_path = path;
  config.loss = LossKind::Squared;
  config.repeats = 10;
  config.seed = 7;
  config.solver.rho = 0.1;
  config.solver.closed_form_w = true;
  config.solver.max_outer_iters = 300;
  const auto summary = harness::run_experiment(config);
  const double mse = summary.metric_means.at("mse");
  char detail[120];
  std::snprintf(detail, sizeof(detail), "test MSE %.2f over 10 runs (band [95,125])", mse);
  record(10, "real-data sanity", mse >= 95.0 && mse <= 125.0, detail);
}

// ---------------------------------------------------------------------------
// Criterion 11: reports are byte-identical for identical configs and seeds.

std::string strip_timing(std::string s) {
  static const std::regex timing("\"wall_time_seconds\": [0-9.eE+-]+");
  return std::regex_replace(s, timing, "\"wall_time_seconds\": 0");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_11() {
  const fs::path root =
      fs::temp_directory_path() / ("srml_acceptance_" + std::to_string(std::random_device{}()));
  harness::ExperimentConfig config;
  config.data.preset = "synth3";
  config.data.synth_seed = 2;
  config.loss = LossKind::Logistic;
  config.lambda_grid = {0.1, 1.0};
  config.c_grid = {0.1};
  config.repeats = 2;
  config.seed = 12;
  config.solver.rho = 1.0;
  config.solver.max_outer_iters = 40;
  config.solver.max_inner_iters = 60;

  config.out_dir = (root / "a").string();
  (void)harness::run_experiment(config);
  config.out_dir = (root / "b").string();
  (void)harness::run_experiment(config);

  const std::string a = strip_timing(slurp(root / "a" / "report.json"));
  const std::string b = strip_timing(slurp(root / "b" / "report.json"));
  const bool equal = !a.empty() && a == b;
  std::error_code ec;
  fs::remove_all(root, ec);
  record(11, "harness determinism", equal,
         equal ? "reports byte-identical modulo timing fields" : "reports differ");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  try {
    criteria_1_and_2();
    criterion_3();
    criterion_4();
    criteria_5_and_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance suite aborted: %s\n", e.what());
    return 1;
  }

  int failed = 0;
  for (const auto& r : g_results) failed += r.status == 1 ? 1 : 0;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criteria run, %d failed (%.1fs)\n", static_cast<int>(g_results.size()), failed,
              secs);
  return failed == 0 ? 0 : 1;
}
