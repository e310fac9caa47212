#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srml/config.hpp"
#include "srml/losses.hpp"
#include "srml/problem.hpp"
#include "srml/solver.hpp"
#include "srml/synth.hpp"
#include "srml/weights.hpp"

namespace srml::harness {

// ---------------------------------------------------------------------------
// Splits and folds

struct Split {
  MultiTaskProblem train;
  MultiTaskProblem test;
  // Original row indices per task, for auditing that CV never sees test rows.
  std::vector<std::vector<Eigen::Index>> train_rows;
  std::vector<std::vector<Eigen::Index>> test_rows;
};

// Per-task shuffled split with floor(fraction * m_t) training rows.
// Deterministic per seed. Throws TooFewSamples when a task has < 2 rows.
Split split(const MultiTaskProblem& p, double fraction, std::uint64_t seed);

struct Fold {
  MultiTaskProblem fit;  // all rows outside the fold
  MultiTaskProblem val;  // the held-out fold
  std::vector<std::vector<Eigen::Index>> val_rows;  // indices into p, per task
};

// Per-task-stratified K folds. Throws TooFewSamples when some task has
// fewer than K rows.
std::vector<Fold> make_folds(const MultiTaskProblem& p, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiment configuration

struct DataSource {
  std::string csv_path;     // when nonempty, load this CSV
  std::string preset;       // otherwise generate this synthetic preset
  std::uint64_t synth_seed = 0;
};

std::vector<double> default_grid();  // 1e-3 .. 1e3, logarithmic, 7 points

struct ExperimentConfig {
  DataSource data;
  std::optional<LossKind> loss;  // default: from the problem kind
  std::vector<double> lambda_grid = default_grid();
  std::vector<double> c_grid = default_grid();
  double train_fraction = 0.6;
  int cv_folds = 5;
  int repeats = 10;
  std::uint64_t seed = 0;
  std::string out_dir;
  // Template for every fit; lambda and c are overwritten per grid point.
  SolverConfig solver;
  // Optional task reordering before fitting (the chain couples consecutive
  // tasks; dataset order is the default).
  std::optional<std::uint64_t> task_permutation_seed;

  void validate() const;
};

// ---------------------------------------------------------------------------
// CV grid search

struct CvCell {
  double lambda = 0.0;
  double c = 0.0;
  double score = 0.0;  // mean validation MSE (regression) or ACC (classification)
  bool failed = false;
};

struct CvResult {
  double best_lambda = 0.0;
  double best_c = 0.0;
  std::vector<CvCell> table;
};

// Mean validation metric per grid point over per-task-stratified folds;
// argmin of MSE for regression, argmax of ACC for classification. Ties break
// toward larger lambda, then larger c. A failed cell scores worst.
CvResult cv_grid_search(const MultiTaskProblem& train, LossKind loss,
                        const ExperimentConfig& config, std::uint64_t fold_seed);

// ---------------------------------------------------------------------------
// Reports

struct RunReport {
  std::map<std::string, double> metrics;
  std::vector<TraceRow> convergence_trace;
  SolverConfig hyperparams;  // includes the chosen lambda and c
  std::optional<std::map<std::string, double>> bound_values;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  bool converged = false;
};

struct ExperimentSummary {
  std::map<std::string, double> metric_means;
  std::map<std::string, double> metric_stds;
  std::vector<RunReport> runs;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> sign_match_rate;  // synthetic sources only, repeat 0
};

// Repeats split -> CV -> fit -> evaluate with seeds derived from config.seed
// and writes report.json, trace.csv, signmatch.csv (synthetic sources) and
// model.json under config.out_dir. Partial results are flushed with a
// failure marker when a repeat throws.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double value = 0.0;
  double metric_mean = 0.0;
  double metric_std = 0.0;
};

enum class SweepParam { Rho, Lambda, C };

// Varies one hyperparameter with the others at their config defaults and
// evaluates the primary test metric (MSE or ACC) over config.repeats splits.
std::vector<SweepRow> sensitivity_sweep(SweepParam param, const std::vector<double>& values,
                                        const ExperimentConfig& config);

struct ScaleRow {
  double value = 0.0;
  double seconds_mean = 0.0;
  double seconds_std = 0.0;
  double runtime_ratio = 0.0;  // seconds vs previous row; 0 for the first row
  bool anomalous = false;      // ratio > 3 while the axis value doubled
};

enum class ScaleAxis { M, T, D };

struct ScaleResult {
  std::vector<ScaleRow> rows;
  double loglog_slope = 0.0;  // least-squares fit when >= 2 distinct values
};

// Times fit() on freshly generated synthetic data per axis value,
// regenerating `regens` times. The solver config should use a fixed
// iteration budget so the measured work is comparable across values.
ScaleResult scale_sweep(ScaleAxis axis, const std::vector<double>& values,
                        const synth::SynthSpec& base, const SolverConfig& solver,
                        LossKind loss, int regens = 10);

// ---------------------------------------------------------------------------
// Writers (also used by the CLI)

void write_report_json(const std::string& path, const ExperimentSummary& summary,
                       const ExperimentConfig& config, bool failed = false,
                       const std::string& failure = "");
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);
void write_signmatch_csv(const std::string& path, const WeightMatrix& learned,
                         const WeightMatrix& truth, double zero_tol = 0.0);
void write_cv_table_csv(const std::string& path, const CvResult& cv);
void write_sweep_csv(const std::string& path, const std::string& param_name,
                     const std::vector<SweepRow>& rows);
void write_scale_csv(const std::string& path, const std::string& axis_name,
                     const ScaleResult& result);

}  // namespace srml::harness
