#include "srml/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "srml/dataset_io.hpp"
#include "srml/metrics.hpp"
#include "srml/model_io.hpp"
#include "srml/rng.hpp"
#include "srml/theory.hpp"

namespace srml::harness {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

MultiTaskProblem take_rows(const MultiTaskProblem& p,
                           const std::vector<std::vector<Eigen::Index>>& rows) {
  MultiTaskProblem out;
  out.kind = p.kind;
  out.tasks.reserve(p.tasks.size());
  for (std::size_t t = 0; t < p.tasks.size(); ++t) {
    const TaskData& src = p.tasks[t];
    TaskData dst;
    dst.X.resize(static_cast<Eigen::Index>(rows[t].size()), src.dim());
    dst.y.resize(static_cast<Eigen::Index>(rows[t].size()));
    for (std::size_t i = 0; i < rows[t].size(); ++i) {
      dst.X.row(static_cast<Eigen::Index>(i)) = src.X.row(rows[t][i]);
      dst.y[static_cast<Eigen::Index>(i)] = src.y[rows[t][i]];
    }
    out.tasks.push_back(std::move(dst));
  }
  return out;
}

// Runs f(0..n-1) across hardware threads; f must not throw.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
  };
  std::vector<std::future<void>> handles;
  const unsigned extra = static_cast<unsigned>(std::min<std::size_t>(hw - 1, n - 1));
  handles.reserve(extra);
  for (unsigned k = 0; k < extra; ++k) handles.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& h : handles) h.get();
}

double primary_metric(const std::map<std::string, double>& metrics, ProblemKind kind) {
  return metrics.at(kind == ProblemKind::Regression ? "mse" : "acc");
}

// Lower-is-better orientation for CV scores.
double oriented(double score, ProblemKind kind) {
  return kind == ProblemKind::Regression ? score : -score;
}

std::map<std::string, double> bound_report(const MultiTaskProblem& train,
                                           const WeightMatrix& weights) {
  std::map<std::string, double> out;
  const double x_norm = theory::l1_inf_norm(train);
  const double alpha = theory::attained_l1_budget(weights);
  long min_m = std::numeric_limits<long>::max();
  for (const auto& t : train.tasks) min_m = std::min<long>(min_m, t.rows());
  theory::BoundInputs b;
  b.lipschitz_L = 1.0;
  b.alpha = alpha;
  b.epsilon = 0.05;
  b.m = min_m;
  b.T = static_cast<long>(train.tasks.size());
  out["l1_inf_norm"] = x_norm;
  out["alpha"] = alpha;
  out["generalization_bound"] = theory::generalization_bound(b, x_norm);
  const auto terms = theory::rademacher_bound_terms(train, alpha);
  out["rademacher_tight"] = terms.tight;
  out["rademacher_loose"] = terms.loose;
  try {
    out["assumption2_holds"] = theory::assumption2_holds(train) ? 1.0 : 0.0;
  } catch (const NonUniqueMaximizer&) {
    // tied column norms; the tightness comparison is undefined
  }
  return out;
}

struct ResolvedData {
  MultiTaskProblem problem;
  std::vector<std::string> task_ids;
  std::optional<WeightMatrix> truth;  // synthetic sources only
};

ResolvedData resolve_data(const ExperimentConfig& config) {
  ResolvedData out;
  if (!config.data.csv_path.empty()) {
    Dataset ds = load_csv(config.data.csv_path);
    out.problem = std::move(ds.problem);
    out.task_ids = std::move(ds.task_ids);
    if (config.loss && *config.loss == LossKind::Logistic) {
      out.problem.kind = ProblemKind::Classification;
    }
  } else {
    synth::SynthSpec spec = synth::preset(config.data.preset);
    spec.seed = config.data.synth_seed;
    synth::SynthData data = synth::generate(spec);
    out.problem = std::move(data.problem);
    out.truth = std::move(data.truth.W);
    for (Eigen::Index t = 0; t < out.problem.task_count(); ++t) {
      out.task_ids.push_back("task" + std::to_string(t));
    }
  }
  if (config.task_permutation_seed) {
    std::vector<std::size_t> order(out.problem.tasks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(*config.task_permutation_seed);
    rng.shuffle(order);
    MultiTaskProblem permuted;
    permuted.kind = out.problem.kind;
    std::vector<std::string> ids;
    WeightMatrix truth;
    if (out.truth) truth.resize(out.truth->rows(), out.truth->cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
      permuted.tasks.push_back(std::move(out.problem.tasks[order[i]]));
      ids.push_back(std::move(out.task_ids[order[i]]));
      if (out.truth) truth.col(static_cast<Eigen::Index>(i)) =
          out.truth->col(static_cast<Eigen::Index>(order[i]));
    }
    out.problem = std::move(permuted);
    out.task_ids = std::move(ids);
    if (out.truth) *out.truth = std::move(truth);
  }
  validate_problem(out.problem);
  return out;
}

json config_json(const ExperimentConfig& config) {
  json j;
  j["data"] = {{"csv_path", config.data.csv_path},
               {"preset", config.data.preset},
               {"synth_seed", config.data.synth_seed}};
  if (config.loss) j["loss"] = to_string(*config.loss);
  j["lambda_grid"] = config.lambda_grid;
  j["c_grid"] = config.c_grid;
  j["train_fraction"] = config.train_fraction;
  j["cv_folds"] = config.cv_folds;
  j["repeats"] = config.repeats;
  j["seed"] = config.seed;
  j["solver"] = {{"reg", to_string(config.solver.reg_kind)},
                 {"rho", config.solver.rho},
                 {"rho_policy", to_string(config.solver.rho_policy)},
                 {"rho_margin", config.solver.rho_margin},
                 {"primal_tol", config.solver.primal_tol},
                 {"dual_tol", config.solver.dual_tol},
                 {"max_outer_iters", config.solver.max_outer_iters},
                 {"max_inner_iters", config.solver.max_inner_iters},
                 {"closed_form_w", config.solver.closed_form_w}};
  return j;
}

}  // namespace

std::vector<double> default_grid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

void ExperimentConfig::validate() const {
  if (data.csv_path.empty() && data.preset.empty()) {
    throw std::invalid_argument("experiment needs a CSV path or a synthetic preset");
  }
  if (lambda_grid.empty() || c_grid.empty()) throw std::invalid_argument("grids must be nonempty");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must be in (0,1)");
  }
  if (cv_folds < 2) throw std::invalid_argument("cv_folds must be >= 2");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
}

Split split(const MultiTaskProblem& p, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split fraction must be in (0,1)");
  }
  Split out;
  out.train_rows.resize(p.tasks.size());
  out.test_rows.resize(p.tasks.size());
  for (std::size_t t = 0; t < p.tasks.size(); ++t) {
    const Eigen::Index m = p.tasks[t].rows();
    if (m < 2) throw TooFewSamples("task " + std::to_string(t) + " has fewer than 2 rows");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Rng rng(Rng::mix(seed, t));
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(m)));
    out.train_rows[t].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows[t].assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    if (out.train_rows[t].empty() || out.test_rows[t].empty()) {
      throw TooFewSamples("task " + std::to_string(t) + ": split leaves an empty side");
    }
  }
  out.train = take_rows(p, out.train_rows);
  out.test = take_rows(p, out.test_rows);
  return out;
}

std::vector<Fold> make_folds(const MultiTaskProblem& p, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be >= 2");
  const std::size_t K = static_cast<std::size_t>(k);
  // fold -> task -> original rows
  std::vector<std::vector<std::vector<Eigen::Index>>> fold_rows(
      K, std::vector<std::vector<Eigen::Index>>(p.tasks.size()));
  for (std::size_t t = 0; t < p.tasks.size(); ++t) {
    const Eigen::Index m = p.tasks[t].rows();
    if (m < k) {
      throw TooFewSamples("task " + std::to_string(t) + " has " + std::to_string(m) +
                          " rows, cannot build " + std::to_string(k) + " folds");
    }
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Rng rng(Rng::mix(seed, t));
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) fold_rows[i % K][t].push_back(idx[i]);
  }

  std::vector<Fold> folds;
  folds.reserve(K);
  for (std::size_t f = 0; f < K; ++f) {
    Fold fold;
    std::vector<std::vector<Eigen::Index>> fit_rows(p.tasks.size());
    for (std::size_t t = 0; t < p.tasks.size(); ++t) {
      for (std::size_t g = 0; g < K; ++g) {
        if (g == f) continue;
        fit_rows[t].insert(fit_rows[t].end(), fold_rows[g][t].begin(), fold_rows[g][t].end());
      }
    }
    fold.fit = take_rows(p, fit_rows);
    fold.val = take_rows(p, fold_rows[f]);
    fold.val_rows = fold_rows[f];
    folds.push_back(std::move(fold));
  }
  return folds;
}

CvResult cv_grid_search(const MultiTaskProblem& train, LossKind loss,
                        const ExperimentConfig& config, std::uint64_t fold_seed) {
  const auto folds = make_folds(train, config.cv_folds, fold_seed);

  std::vector<CvCell> cells;
  for (double lambda : config.lambda_grid) {
    for (double c : config.c_grid) cells.push_back({lambda, c, 0.0, false});
  }

  parallel_for(cells.size(), [&](std::size_t i) {
    CvCell& cell = cells[i];
    try {
      double total = 0.0;
      for (const Fold& fold : folds) {
        SolverConfig cfg = config.solver;
        cfg.lambda = cell.lambda;
        cfg.c = cell.c;
        const FitResult res = fit(fold.fit, loss, cfg);
        total += primary_metric(metrics::evaluate(fold.val, res.weights), train.kind);
      }
      cell.score = total / static_cast<double>(folds.size());
      if (!std::isfinite(cell.score)) cell.failed = true;
    } catch (const Error&) {
      cell.failed = true;
    } catch (const std::invalid_argument&) {
      cell.failed = true;
    }
  });

  const CvCell* best = nullptr;
  for (const CvCell& cell : cells) {
    if (cell.failed) continue;
    if (best == nullptr) {
      best = &cell;
      continue;
    }
    const double a = oriented(cell.score, train.kind);
    const double b = oriented(best->score, train.kind);
    const bool better =
        a < b || (a == b && (cell.lambda > best->lambda ||
                             (cell.lambda == best->lambda && cell.c > best->c)));
    if (better) best = &cell;
  }
  if (best == nullptr) throw Error("every CV grid cell failed");
  return {best->lambda, best->c, std::move(cells)};
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  const auto t_start = std::chrono::steady_clock::now();

  if (!config.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.out_dir + "'");
  }
  const auto out_path = [&](const char* name) {
    return (fs::path(config.out_dir) / name).string();
  };

  ResolvedData data = resolve_data(config);
  const LossKind loss = config.loss.value_or(default_loss(data.problem.kind));

  ExperimentSummary summary;
  summary.seed = config.seed;
  std::optional<ModelFile> first_model;
  std::optional<std::vector<TraceRow>> first_trace;

  try {
    for (int r = 0; r < config.repeats; ++r) {
      const std::uint64_t run_seed = Rng::mix(config.seed, 0x5eed + static_cast<std::uint64_t>(r));
      const auto r_start = std::chrono::steady_clock::now();

      const Split sp = split(data.problem, config.train_fraction, Rng::mix(run_seed, 1));
      const CvResult cv = cv_grid_search(sp.train, loss, config, Rng::mix(run_seed, 2));

      SolverConfig cfg = config.solver;
      cfg.lambda = cv.best_lambda;
      cfg.c = cv.best_c;
      const FitResult res = fit(sp.train, loss, cfg);

      RunReport run;
      run.seed = run_seed;
      run.metrics = metrics::evaluate(sp.test, res.weights);
      run.convergence_trace = res.trace;
      run.hyperparams = cfg;
      run.hyperparams.rho = res.effective_rho;
      run.converged = res.converged;
      run.bound_values = bound_report(sp.train, res.weights);
      run.wall_time_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - r_start).count();
      summary.runs.push_back(std::move(run));

      if (r == 0) {
        first_trace = res.trace;
        ModelFile model;
        model.weights = res.weights;
        model.loss = loss;
        model.config = cfg;
        model.task_ids = data.task_ids;
        first_model = std::move(model);
        if (data.truth) {
          summary.sign_match_rate =
              metrics::sign_match(res.weights, *data.truth).match_rate;
        }
      }
    }
  } catch (...) {
    summary.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (!config.out_dir.empty()) {
      try {
        write_report_json(out_path("report.json"), summary, config, /*failed=*/true,
                          "run failed; partial results");
      } catch (...) {
      }
    }
    throw;
  }

  // mean and sample standard deviation over repeats
  std::map<std::string, std::vector<double>> series;
  for (const RunReport& run : summary.runs) {
    for (const auto& [name, value] : run.metrics) series[name].push_back(value);
  }
  for (const auto& [name, values] : series) {
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    summary.metric_means[name] = mean;
    summary.metric_stds[name] = values.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  }
  summary.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (!config.out_dir.empty()) {
    write_report_json(out_path("report.json"), summary, config);
    if (first_trace) write_trace_csv(out_path("trace.csv"), *first_trace);
    if (first_model) save_model(out_path("model.json"), *first_model);
    if (data.truth && first_model) {
      write_signmatch_csv(out_path("signmatch.csv"), first_model->weights, *data.truth);
    }
  }
  return summary;
}

std::vector<SweepRow> sensitivity_sweep(SweepParam param, const std::vector<double>& values,
                                        const ExperimentConfig& config) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  ResolvedData data = resolve_data(config);
  const LossKind loss = config.loss.value_or(default_loss(data.problem.kind));

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double value : values) {
    SolverConfig cfg = config.solver;
    switch (param) {
      case SweepParam::Rho:
        cfg.rho = value;
        cfg.rho_policy = RhoPolicy::Fixed;
        break;
      case SweepParam::Lambda:
        cfg.lambda = value;
        break;
      case SweepParam::C:
        cfg.c = value;
        break;
    }
    std::vector<double> scores;
    for (int r = 0; r < config.repeats; ++r) {
      const std::uint64_t run_seed = Rng::mix(config.seed, 0x5eed + static_cast<std::uint64_t>(r));
      const Split sp = split(data.problem, config.train_fraction, Rng::mix(run_seed, 1));
      const FitResult res = fit(sp.train, loss, cfg);
      scores.push_back(primary_metric(metrics::evaluate(sp.test, res.weights),
                                      data.problem.kind));
    }
    const double n = static_cast<double>(scores.size());
    const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    rows.push_back({value, mean, scores.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0});
  }
  return rows;
}

ScaleResult scale_sweep(ScaleAxis axis, const std::vector<double>& values,
                        const synth::SynthSpec& base, const SolverConfig& solver, LossKind loss,
                        int regens) {
  if (values.empty()) throw std::invalid_argument("scale sweep needs at least one value");
  ScaleResult result;
  for (double value : values) {
    synth::SynthSpec spec = base;
    const long v = static_cast<long>(value);
    switch (axis) {
      case ScaleAxis::M: spec.m = v; break;
      case ScaleAxis::T: spec.T = v; break;
      case ScaleAxis::D: spec.d = v; break;
    }
    std::vector<double> seconds;
    for (int g = 0; g < regens; ++g) {
      spec.seed = Rng::mix(base.seed, static_cast<std::uint64_t>(g));
      const synth::SynthData data = synth::generate(spec);
      const auto start = std::chrono::steady_clock::now();
      (void)fit(data.problem, loss, solver);
      seconds.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    const double n = static_cast<double>(seconds.size());
    const double mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / n;
    double var = 0.0;
    for (double s : seconds) var += (s - mean) * (s - mean);
    ScaleRow row{value, mean, seconds.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0, 0.0, false};
    if (!result.rows.empty() && result.rows.back().seconds_mean > 0.0) {
      const ScaleRow& prev = result.rows.back();
      row.runtime_ratio = row.seconds_mean / prev.seconds_mean;
      const bool doubled = std::abs(row.value / prev.value - 2.0) < 1e-9;
      row.anomalous = doubled && row.runtime_ratio > 3.0;
    }
    result.rows.push_back(row);
  }

  // log-log least squares over the distinct-value rows
  if (result.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(result.rows.size());
    for (const auto& row : result.rows) {
      const double x = std::log(row.value);
      const double y = std::log(std::max(row.seconds_mean, 1e-12));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    result.loglog_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return result;
}

void write_report_json(const std::string& path, const ExperimentSummary& summary,
                       const ExperimentConfig& config, bool failed, const std::string& failure) {
  json j;
  j["srml_report_version"] = 1;
  j["failed"] = failed;
  if (failed) j["failure"] = failure;
  j["seed"] = summary.seed;
  j["config"] = config_json(config);
  json metrics = json::object();
  for (const auto& [name, mean] : summary.metric_means) {
    metrics[name] = {{"mean", mean}, {"std", summary.metric_stds.at(name)}};
  }
  j["metrics"] = std::move(metrics);
  if (summary.sign_match_rate) j["sign_match_rate"] = *summary.sign_match_rate;
  json runs = json::array();
  for (const RunReport& run : summary.runs) {
    json rj;
    rj["seed"] = run.seed;
    rj["lambda"] = run.hyperparams.lambda;
    rj["c"] = run.hyperparams.c;
    rj["rho"] = run.hyperparams.rho;
    rj["converged"] = run.converged;
    rj["iterations"] = run.convergence_trace.size();
    rj["metrics"] = run.metrics;
    if (run.bound_values) rj["bounds"] = *run.bound_values;
    rj["wall_time_seconds"] = run.wall_time_seconds;
    runs.push_back(std::move(rj));
  }
  j["runs"] = std::move(runs);
  j["wall_time_seconds"] = summary.wall_time_seconds;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write to '" + path + "'");
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "iter,objective,primal_res,dual_res,vk\n";
  for (const TraceRow& row : trace) {
    out << row.iter << ',' << format_double(row.objective) << ',' << format_double(row.primal_res)
        << ',' << format_double(row.dual_res) << ',' << format_double(row.vk) << "\n";
  }
}

void write_signmatch_csv(const std::string& path, const WeightMatrix& learned,
                         const WeightMatrix& truth, double zero_tol) {
  const metrics::SignMatchResult match = metrics::sign_match(learned, truth, zero_tol);
  const SignMatrix learned_signs = sign_pattern(learned, zero_tol);
  const SignMatrix truth_signs = sign_pattern(truth, zero_tol);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "task,feature,truth_sign,learned_sign,match\n";
  for (Eigen::Index t = 0; t < learned.cols(); ++t) {
    for (Eigen::Index j = 0; j < learned.rows(); ++j) {
      out << t << ',' << j << ',' << truth_signs(j, t) << ',' << learned_signs(j, t) << ','
          << (match.cells(j, t) == 0 ? 1 : 0) << "\n";
    }
  }
}

void write_cv_table_csv(const std::string& path, const CvResult& cv) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "lambda,c,score,failed\n";
  for (const CvCell& cell : cv.table) {
    out << format_double(cell.lambda) << ',' << format_double(cell.c) << ','
        << format_double(cell.score) << ',' << (cell.failed ? 1 : 0) << "\n";
  }
}

void write_sweep_csv(const std::string& path, const std::string& param_name,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << param_name << ",metric_mean,metric_std\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.value) << ',' << format_double(row.metric_mean) << ','
        << format_double(row.metric_std) << "\n";
  }
}

void write_scale_csv(const std::string& path, const std::string& axis_name,
                     const ScaleResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << axis_name << ",seconds_mean,seconds_std,runtime_ratio,anomalous\n";
  for (const ScaleRow& row : result.rows) {
    out << format_double(row.value) << ',' << format_double(row.seconds_mean) << ','
        << format_double(row.seconds_std) << ',' << format_double(row.runtime_ratio) << ','
        << (row.anomalous ? 1 : 0) << "\n";
  }
  out << "# loglog_slope," << format_double(result.loglog_slope) << "\n";
}

}  // namespace srml::harness
