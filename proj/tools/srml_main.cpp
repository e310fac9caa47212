// srml - sign-regularized multi-task learning toolkit
//
// Subcommands: fit, eval, synth, gridsearch, sweep, scale, bounds.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "srml/baselines.hpp"
#include "srml/dataset_io.hpp"
#include "srml/experiment.hpp"
#include "srml/metrics.hpp"
#include "srml/model_io.hpp"
#include "srml/rng.hpp"
#include "srml/solver.hpp"
#include "srml/synth.hpp"
#include "srml/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace srml;

namespace {

struct CommonOpts {
  std::string data_csv;
  std::string preset;
  std::string loss = "squared";
  std::string reg = "l2";
  std::string rho = "0.1";
  double rho_margin = 1.25;
  std::uint64_t seed = 0;
  std::string out_dir = "srml_out";
  int max_outer = 500;
  int max_inner = 200;
  double primal_tol = 1e-4;
  double dual_tol = 1e-4;
  bool closed_form = false;
};

void add_data_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--data", o.data_csv, "input CSV (task_id,target,features...)");
  cmd->add_option("--preset", o.preset, "synthetic preset: synth1|synth2|synth3");
}

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--loss", o.loss, "squared|logistic")
      ->check(CLI::IsMember({"squared", "logistic"}));
  cmd->add_option("--reg", o.reg, "l1|l2")->check(CLI::IsMember({"l1", "l2"}));
  cmd->add_option("--rho", o.rho, "ADMM penalty: a float, or 'auto' for margin*2H");
  cmd->add_option("--rho-margin", o.rho_margin, "margin for --rho auto (must be > 1)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--max-outer", o.max_outer, "outer iteration cap");
  cmd->add_option("--max-inner", o.max_inner, "inner iteration cap");
  cmd->add_option("--primal-tol", o.primal_tol, "primal residual tolerance");
  cmd->add_option("--dual-tol", o.dual_tol, "dual residual tolerance");
  cmd->add_flag("--closed-form-w", o.closed_form,
                "exact normal-equation w-updates (squared loss + l2 only)");
}

SolverConfig make_solver_config(const CommonOpts& o) {
  SolverConfig cfg;
  cfg.reg_kind = harness::reg_from_string(o.reg);
  cfg.max_outer_iters = o.max_outer;
  cfg.max_inner_iters = o.max_inner;
  cfg.primal_tol = o.primal_tol;
  cfg.dual_tol = o.dual_tol;
  cfg.closed_form_w = o.closed_form;
  cfg.rho_margin = o.rho_margin;
  if (o.rho == "auto") {
    cfg.rho_policy = RhoPolicy::FromLipschitz;
  } else {
    cfg.rho_policy = RhoPolicy::Fixed;
    cfg.rho = std::stod(o.rho);
  }
  return cfg;
}

harness::ExperimentConfig make_experiment_config(const CommonOpts& o) {
  harness::ExperimentConfig config;
  config.data.csv_path = o.data_csv;
  config.data.preset = o.preset;
  config.data.synth_seed = o.seed;
  config.loss = harness::loss_from_string(o.loss);
  config.seed = o.seed;
  config.out_dir = o.out_dir;
  config.solver = make_solver_config(o);
  return config;
}

MultiTaskProblem load_problem(const CommonOpts& o, LossKind loss) {
  MultiTaskProblem p;
  if (!o.data_csv.empty()) {
    p = harness::load_csv(o.data_csv).problem;
  } else if (!o.preset.empty()) {
    synth::SynthSpec spec = synth::preset(o.preset);
    spec.seed = o.seed;
    p = synth::generate(spec).problem;
  } else {
    throw Error("need --data or --preset");
  }
  p.kind = loss == LossKind::Logistic ? ProblemKind::Classification : ProblemKind::Regression;
  validate_problem(p);
  return p;
}

void print_summary(const harness::ExperimentSummary& summary) {
  std::printf("runs: %zu, wall time %.2fs\n", summary.runs.size(), summary.wall_time_seconds);
  for (const auto& [name, mean] : summary.metric_means) {
    std::printf("  %-6s %.6g +/- %.3g\n", name.c_str(), mean, summary.metric_stds.at(name));
  }
  if (summary.sign_match_rate) {
    std::printf("  sign-match rate vs ground truth: %.4f\n", *summary.sign_match_rate);
  }
  if (!summary.runs.empty()) {
    std::printf("  chosen (lambda, c) of run 0: (%g, %g)\n",
                summary.runs.front().hyperparams.lambda, summary.runs.front().hyperparams.c);
  }
}

int cmd_fit(const CommonOpts& o, const std::vector<double>& grid_lambda,
            const std::vector<double>& grid_c, std::optional<double> lambda,
            std::optional<double> c, int repeats, double train_fraction, int folds,
            std::optional<std::uint64_t> permute_seed) {
  harness::ExperimentConfig config = make_experiment_config(o);
  config.repeats = repeats;
  config.train_fraction = train_fraction;
  config.cv_folds = folds;
  config.task_permutation_seed = permute_seed;
  if (lambda) config.lambda_grid = {*lambda};
  else if (!grid_lambda.empty()) config.lambda_grid = grid_lambda;
  if (c) config.c_grid = {*c};
  else if (!grid_c.empty()) config.c_grid = grid_c;

  const auto summary = harness::run_experiment(config);
  print_summary(summary);
  std::printf("artifacts in %s: report.json trace.csv model.json%s\n", config.out_dir.c_str(),
              summary.sign_match_rate ? " signmatch.csv" : "");
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_csv) {
  const harness::ModelFile model = harness::load_model(model_path);
  harness::Dataset ds = harness::load_csv(data_csv);
  ds.problem.kind = model.loss == LossKind::Logistic ? ProblemKind::Classification
                                                     : ProblemKind::Regression;
  validate_problem(ds.problem);
  if (ds.problem.dim() != model.weights.rows()) {
    throw DimensionMismatch("model expects " + std::to_string(model.weights.rows()) +
                            " features, data has " + std::to_string(ds.problem.dim()));
  }
  if (ds.problem.task_count() != model.weights.cols()) {
    throw DimensionMismatch("model expects " + std::to_string(model.weights.cols()) +
                            " tasks, data has " + std::to_string(ds.problem.task_count()));
  }
  const auto metric_map = metrics::evaluate(ds.problem, model.weights);
  json j(metric_map);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_synth(const std::string& preset_name, synth::SynthSpec spec, bool have_custom,
              const std::string& out_dir) {
  if (!preset_name.empty()) {
    const std::uint64_t seed = spec.seed;
    const double flip = spec.flip_fraction;
    const double noise = spec.noise_sigma;
    spec = synth::preset(preset_name);
    spec.seed = seed;
    spec.flip_fraction = flip;
    spec.noise_sigma = noise;
  } else if (!have_custom) {
    throw Error("need --preset or explicit --T/--m/--d");
  }
  const auto data = synth::generate(spec);
  fs::create_directories(out_dir);
  harness::save_csv((fs::path(out_dir) / "data.csv").string(), data.problem);

  std::ofstream truth((fs::path(out_dir) / "truth.csv").string());
  truth << "feature,polarity";
  for (Eigen::Index t = 0; t < data.truth.W.cols(); ++t) truth << ",w_task" << t;
  truth << "\n";
  for (Eigen::Index j = 0; j < data.truth.W.rows(); ++j) {
    truth << j << ',' << data.truth.P[j];
    for (Eigen::Index t = 0; t < data.truth.W.cols(); ++t) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", data.truth.W(j, t));
      truth << ',' << buf;
    }
    truth << "\n";
  }
  std::printf("wrote %s/data.csv (%lld tasks x %lld rows, %lld features) and truth.csv\n",
              out_dir.c_str(), static_cast<long long>(data.problem.task_count()),
              static_cast<long long>(data.problem.tasks.front().rows()),
              static_cast<long long>(data.problem.dim()));
  return 0;
}

int cmd_gridsearch(const CommonOpts& o, const std::vector<double>& grid_lambda,
                   const std::vector<double>& grid_c, double train_fraction, int folds) {
  harness::ExperimentConfig config = make_experiment_config(o);
  config.train_fraction = train_fraction;
  config.cv_folds = folds;
  if (!grid_lambda.empty()) config.lambda_grid = grid_lambda;
  if (!grid_c.empty()) config.c_grid = grid_c;
  const LossKind loss = *config.loss;
  const MultiTaskProblem p = load_problem(o, loss);

  const auto sp = harness::split(p, config.train_fraction, Rng::mix(config.seed, 1));
  const auto cv = harness::cv_grid_search(sp.train, loss, config, Rng::mix(config.seed, 2));
  fs::create_directories(o.out_dir);
  harness::write_cv_table_csv((fs::path(o.out_dir) / "cv_table.csv").string(), cv);
  std::printf("best lambda = %g, c = %g (cv_table.csv in %s)\n", cv.best_lambda, cv.best_c,
              o.out_dir.c_str());
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& param, const std::vector<double>& values,
              int repeats, double train_fraction) {
  harness::ExperimentConfig config = make_experiment_config(o);
  config.repeats = repeats;
  config.train_fraction = train_fraction;
  harness::SweepParam sweep_param;
  if (param == "rho") sweep_param = harness::SweepParam::Rho;
  else if (param == "lambda") sweep_param = harness::SweepParam::Lambda;
  else if (param == "c") sweep_param = harness::SweepParam::C;
  else throw Error("unknown sweep parameter '" + param + "'");

  const auto rows = harness::sensitivity_sweep(sweep_param, values, config);
  fs::create_directories(o.out_dir);
  const std::string path = (fs::path(o.out_dir) / ("sweep_" + param + ".csv")).string();
  harness::write_sweep_csv(path, param, rows);
  for (const auto& row : rows) {
    std::printf("%s=%-10g metric %.6g +/- %.3g\n", param.c_str(), row.value, row.metric_mean,
                row.metric_std);
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_scale(const CommonOpts& o, const std::string& axis, const std::vector<double>& values,
              int regens, long base_T, long base_m, long base_d) {
  harness::ScaleAxis scale_axis;
  if (axis == "m") scale_axis = harness::ScaleAxis::M;
  else if (axis == "T") scale_axis = harness::ScaleAxis::T;
  else if (axis == "d") scale_axis = harness::ScaleAxis::D;
  else throw Error("unknown scale axis '" + axis + "'");

  synth::SynthSpec base;
  base.T = base_T;
  base.m = base_m;
  base.d = base_d;
  base.seed = o.seed;

  // fixed work per fit so timings compare across sizes
  SolverConfig solver = make_solver_config(o);
  solver.primal_tol = 1e-12;
  solver.dual_tol = 1e-12;

  const auto result =
      harness::scale_sweep(scale_axis, values, base, solver, LossKind::Squared, regens);
  fs::create_directories(o.out_dir);
  const std::string path = (fs::path(o.out_dir) / ("scale_" + axis + ".csv")).string();
  harness::write_scale_csv(path, axis, result);
  for (const auto& row : result.rows) {
    std::printf("%s=%-8g %.4fs +/- %.4fs\n", axis.c_str(), row.value, row.seconds_mean,
                row.seconds_std);
  }
  if (result.rows.size() >= 2) std::printf("log-log slope: %.3f\n", result.loglog_slope);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_bounds(const CommonOpts& o, const std::string& model_path, double L, double epsilon,
               std::optional<double> alpha_override, bool alt_tail) {
  LossKind loss = harness::loss_from_string(o.loss);
  std::optional<harness::ModelFile> model;
  if (!model_path.empty()) {
    model = harness::load_model(model_path);
    loss = model->loss;
  }
  const MultiTaskProblem p = load_problem(o, loss);

  double alpha = alpha_override.value_or(0.0);
  if (!alpha_override && model) alpha = theory::attained_l1_budget(model->weights);

  theory::BoundInputs b;
  b.lipschitz_L = L;
  b.alpha = alpha;
  b.epsilon = epsilon;
  b.T = static_cast<long>(p.tasks.size());
  b.m = p.tasks.front().rows();
  for (const auto& t : p.tasks) b.m = std::min<long>(b.m, t.rows());

  json j;
  j["l1_inf_norm"] = theory::l1_inf_norm(p);
  j["alpha"] = alpha;
  j["lipschitz_L"] = L;
  j["epsilon"] = epsilon;
  j["m"] = b.m;
  j["T"] = b.T;
  j["generalization_bound"] = theory::generalization_bound(b, theory::l1_inf_norm(p), alt_tail);
  const auto terms = theory::rademacher_bound_terms(p, alpha);
  j["rademacher_tight"] = terms.tight;
  j["rademacher_loose"] = terms.loose;
  try {
    j["assumption2_holds"] = theory::assumption2_holds(p);
  } catch (const NonUniqueMaximizer&) {
    j["assumption2_holds"] = nullptr;
  }
  j["lipschitz_H"] = lipschitz_H(p, loss);
  std::cout << j.dump(2) << "\n";
  return 0;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sign-regularized multi-task learning"};
  app.require_subcommand(1);

  CommonOpts o;

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "train a model (CV grid search unless --lambda/--c)");
  add_data_flags(fit_cmd, o);
  add_solver_flags(fit_cmd, o);
  std::optional<double> fixed_lambda, fixed_c;
  std::string grid_lambda_csv, grid_c_csv;
  int repeats = 10, folds = 5;
  double train_fraction = 0.6;
  std::optional<std::uint64_t> permute_seed;
  fit_cmd->add_option("--lambda", fixed_lambda, "fixed lambda (skips the lambda grid)");
  fit_cmd->add_option("--c", fixed_c, "fixed c (skips the c grid)");
  fit_cmd->add_option("--grid-lambda", grid_lambda_csv, "comma-separated lambda grid");
  fit_cmd->add_option("--grid-c", grid_c_csv, "comma-separated c grid");
  fit_cmd->add_option("--repeats", repeats, "number of repeated runs");
  fit_cmd->add_option("--train-fraction", train_fraction, "training split fraction");
  fit_cmd->add_option("--folds", folds, "CV folds");
  fit_cmd->add_option("--permute-tasks", permute_seed,
                      "shuffle task order with this seed before fitting");
  fit_cmd->add_option("--out", o.out_dir, "output directory");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a CSV");
  std::string model_path, eval_data;
  eval_cmd->add_option("--model", model_path, "model.json path")->required();
  eval_cmd->add_option("--data", eval_data, "CSV path")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset as CSV");
  std::string synth_preset;
  synth::SynthSpec custom;
  synth_cmd->add_option("--preset", synth_preset, "synth1|synth2|synth3");
  auto* opt_T = synth_cmd->add_option("--T", custom.T, "tasks");
  synth_cmd->add_option("--m", custom.m, "rows per task");
  synth_cmd->add_option("--d", custom.d, "features");
  synth_cmd->add_option("--flip-fraction", custom.flip_fraction, "sign flip fraction");
  synth_cmd->add_option("--noise-sigma", custom.noise_sigma, "target noise sigma");
  bool classification = false;
  synth_cmd->add_flag("--classification", classification, "binary labels");
  synth_cmd->add_option("--seed", custom.seed, "generator seed");
  std::string synth_out = "srml_out";
  synth_cmd->add_option("--out", synth_out, "output directory");

  // gridsearch
  auto* grid_cmd = app.add_subcommand("gridsearch", "CV grid search only; emits the CV table");
  add_data_flags(grid_cmd, o);
  add_solver_flags(grid_cmd, o);
  grid_cmd->add_option("--grid-lambda", grid_lambda_csv, "comma-separated lambda grid");
  grid_cmd->add_option("--grid-c", grid_c_csv, "comma-separated c grid");
  grid_cmd->add_option("--train-fraction", train_fraction, "training split fraction");
  grid_cmd->add_option("--folds", folds, "CV folds");
  grid_cmd->add_option("--out", o.out_dir, "output directory");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "sensitivity sweep over one hyperparameter");
  std::string sweep_param = "c", sweep_values = "0.001,0.01,0.1,1,10";
  sweep_cmd->add_option("--param", sweep_param, "rho|lambda|c")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values");
  add_data_flags(sweep_cmd, o);
  add_solver_flags(sweep_cmd, o);
  sweep_cmd->add_option("--repeats", repeats, "splits per value");
  sweep_cmd->add_option("--train-fraction", train_fraction, "training split fraction");
  sweep_cmd->add_option("--out", o.out_dir, "output directory");

  // scale
  auto* scale_cmd = app.add_subcommand("scale", "runtime scaling sweep on synthetic data");
  std::string scale_axis = "m", scale_values = "100,200,400,800";
  int regens = 10;
  long base_T = 5, base_m = 100, base_d = 10;
  scale_cmd->add_option("--axis", scale_axis, "m|T|d")->required();
  scale_cmd->add_option("--values", scale_values, "comma-separated axis values");
  scale_cmd->add_option("--regens", regens, "regenerations per value");
  scale_cmd->add_option("--base-T", base_T, "tasks when not swept");
  scale_cmd->add_option("--base-m", base_m, "rows when not swept");
  scale_cmd->add_option("--base-d", base_d, "features when not swept");
  add_solver_flags(scale_cmd, o);
  scale_cmd->add_option("--out", o.out_dir, "output directory");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "generalization-bound calculator");
  add_data_flags(bounds_cmd, o);
  std::string bounds_model;
  double L = 1.0, epsilon = 0.05;
  std::optional<double> alpha_override;
  bool alt_tail = false;
  bounds_cmd->add_option("--model", bounds_model, "take alpha from this model.json");
  bounds_cmd->add_option("--L", L, "loss Lipschitz constant");
  bounds_cmd->add_option("--epsilon", epsilon, "failure probability");
  bounds_cmd->add_option("--alpha", alpha_override, "override the L1 budget");
  bounds_cmd->add_flag("--alt-tail", alt_tail, "use the sqrt(9 ln(2/eps)/(2mT)) tail");
  bounds_cmd->add_option("--loss", o.loss, "squared|logistic");
  bounds_cmd->add_option("--seed", o.seed, "synthetic preset seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) {
      return cmd_fit(o, parse_values(grid_lambda_csv), parse_values(grid_c_csv), fixed_lambda,
                     fixed_c, repeats, train_fraction, folds, permute_seed);
    }
    if (eval_cmd->parsed()) return cmd_eval(model_path, eval_data);
    if (synth_cmd->parsed()) {
      if (classification) custom.kind = ProblemKind::Classification;
      return cmd_synth(synth_preset, custom, opt_T->count() > 0, synth_out);
    }
    if (grid_cmd->parsed()) {
      return cmd_gridsearch(o, parse_values(grid_lambda_csv), parse_values(grid_c_csv),
                            train_fraction, folds);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(o, sweep_param, parse_values(sweep_values), repeats, train_fraction);
    }
    if (scale_cmd->parsed()) {
      return cmd_scale(o, scale_axis, parse_values(scale_values), regens, base_T, base_m, base_d);
    }
    if (bounds_cmd->parsed()) {
      return cmd_bounds(o, bounds_model, L, epsilon, alpha_override, alt_tail);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
