#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "partwise/csv.hpp"
#include "partwise/eval.hpp"
#include "partwise/model_io.hpp"
#include "partwise/optimizer.hpp"
#include "partwise/pipeline.hpp"

namespace partwise {
namespace cli_detail {

inline LossKind default_loss(Task task) {
  return task == Task::classification ? LossKind::logistic : LossKind::squared;
}

inline const char* to_string(LossKind k) {
  return k == LossKind::logistic ? "logistic" : "squared";
}

struct CommonTrainFlags {
  double lambda0 = 0.01;
  double lambdaP = 0.001;
  int max_iters = 1000;
  double step = 1.0;
  double tol = 1e-9;
  bool no_fista = false;
  bool no_warm_start = false;

  TrainConfig to_config(LossKind loss) const {
    TrainConfig cfg;
    cfg.loss = loss;
    cfg.lambda0 = lambda0;
    cfg.lambdaP = lambdaP;
    cfg.max_iterations = max_iters;
    cfg.initial_step = step;
    cfg.termination_gap = tol;
    cfg.use_fista = !no_fista;
    cfg.use_warm_start = !no_warm_start;
    return cfg;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda0", lambda0, "weight of the elementwise L1 penalty")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--lambdaP", lambdaP, "weight of the per-partition max-norm penalty")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--max-iters", max_iters, "iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--step", step, "initial step size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tol", tol, "objective gap that counts as converged")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_flag("--no-fista", no_fista, "plain proximal gradient, no acceleration");
    cmd->add_flag("--no-warm-start", no_warm_start, "skip the global-only seeding fit");
  }
};

struct TrainOptions {
  std::string in;
  std::string out;
  std::string target = "target";
  Task task = Task::classification;
  LossKind loss = LossKind::logistic;
  bool loss_given = false;
  std::string partitions = "quantile";
  int quantiles = 5;
  std::string scale = "none";
  bool intercept = false;
  CommonTrainFlags flags;
  bool json_out = false;
};

inline json train_meta(const TrainConfig& cfg, const TrainReport& report) {
  json meta;
  meta["loss"] = to_string(cfg.loss);
  meta["lambda0"] = cfg.lambda0;
  meta["lambdaP"] = cfg.lambdaP;
  meta["iterations"] = report.iterations;
  meta["stop_reason"] = partwise::to_string(report.reason);
  meta["final_objective"] = report.final_objective;
  meta["active_local_columns"] = report.active_local_columns;
  return meta;
}

inline int cmd_train(const TrainOptions& opt, std::ostream& out) {
  const CsvTable table = read_csv_file(opt.in);
  const Dataset data = dataset_from_table(table, opt.target, opt.task);

  PipelineConfig cfg;
  cfg.scheme = opt.partitions == "quantile" ? PartitionScheme::quantile : PartitionScheme::none;
  cfg.quantile_count = opt.quantiles;
  cfg.scaling = opt.scale == "minmax" ? FeatureScaling::minmax : FeatureScaling::none;
  cfg.add_intercept = opt.intercept;
  cfg.train = opt.flags.to_config(opt.loss_given ? opt.loss : default_loss(opt.task));

  auto [model, report] = fit_pipeline(data, cfg);
  save_model(model, opt.out, train_meta(cfg.train, report));

  const double metric = data.task == Task::classification ? error_rate(model, data)
                                                          : partwise::rmse(model, data);
  if (opt.json_out) {
    json j;
    j["samples"] = data.n();
    j["features"] = data.dims();
    j["partition_columns"] = model.partitions.size();
    j["active_local_columns"] = report.active_local_columns;
    j["iterations"] = report.iterations;
    j["stop_reason"] = partwise::to_string(report.reason);
    j["final_objective"] = report.final_objective;
    j[data.task == Task::classification ? "train_error" : "train_rmse"] = metric;
    j["model_path"] = opt.out;
    out << j.dump(2) << '\n';
  } else {
    out << "samples: " << data.n() << ", features: " << data.dims() << '\n';
    out << "partitions: " << model.partitions.local_count() << " local, "
        << report.active_local_columns << " active after fit\n";
    out << "iterations: " << report.iterations << " (" << partwise::to_string(report.reason)
        << "), objective " << report.final_objective << '\n';
    out << (data.task == Task::classification ? "train error: " : "train rmse: ") << metric
        << '\n';
    out << "wrote " << opt.out << '\n';
  }
  return 0;
}

struct PredictOptions {
  std::string model_path;
  std::string in;
  std::string out;
  std::string target = "target";
};

inline int cmd_predict(const PredictOptions& opt, std::ostream& out) {
  const Model model = load_model(opt.model_path);
  const CsvTable table = read_csv_file(opt.in);

  const int target = table.column(opt.target);
  Matrix features;
  if (target < 0) {
    features = table.values;
  } else {
    features.resize(table.values.rows(), table.values.cols() - 1);
    Eigen::Index keep = 0;
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      if (j != target) features.col(keep++) = table.values.col(j);
    }
  }
  if (features.cols() != model.input_dims) {
    throw std::invalid_argument("input has " + std::to_string(features.cols()) +
                                " feature columns, model expects " +
                                std::to_string(model.input_dims));
  }

  if (model.task == Task::classification) {
    Matrix result(features.rows(), 2);
    if (features.rows() > 0) {
      const Vector scores = predict_scores(model, features);
      for (Eigen::Index i = 0; i < scores.size(); ++i) {
        result(i, 0) = scores[i] >= 0.0 ? 1.0 : -1.0;
        result(i, 1) = scores[i];
      }
    }
    write_csv_file(opt.out, {"label", "score"}, result);
  } else {
    Matrix result(features.rows(), 1);
    if (features.rows() > 0) {
      const Vector scores = predict_scores(model, features);
      for (Eigen::Index i = 0; i < scores.size(); ++i) {
        result(i, 0) = model.preprocessing.destandardize_target(scores[i]);
      }
    }
    write_csv_file(opt.out, {"prediction"}, result);
  }
  out << "wrote " << features.rows() << " predictions to " << opt.out << '\n';
  return 0;
}

struct EvalOptions {
  std::string model_path;
  std::string in;
  std::string target = "target";
  std::string task;  // optional cross-check
  bool json_out = false;
};

inline int cmd_eval(const EvalOptions& opt, std::ostream& out) {
  const Model model = load_model(opt.model_path);
  if (!opt.task.empty() && task_from_string(opt.task) != model.task) {
    throw std::invalid_argument("task mismatch: model is " +
                                std::string(to_string(model.task)) + ", data declared as " +
                                opt.task);
  }
  const CsvTable table = read_csv_file(opt.in);
  const Dataset data = dataset_from_table(table, opt.target, model.task);

  if (model.task == Task::classification) {
    const Vector scores = predict_scores(model, data.features);
    Eigen::Index tp = 0, tn = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      const bool positive = scores[i] >= 0.0;
      if (data.targets[i] == 1.0) {
        (positive ? tp : fn) += 1;
      } else {
        (positive ? fp : tn) += 1;
      }
    }
    const double err = static_cast<double>(fp + fn) / static_cast<double>(data.n());
    if (opt.json_out) {
      json j;
      j["samples"] = data.n();
      j["error_rate"] = err;
      j["true_positive"] = tp;
      j["true_negative"] = tn;
      j["false_positive"] = fp;
      j["false_negative"] = fn;
      out << j.dump(2) << '\n';
    } else {
      out << "samples: " << data.n() << '\n';
      out << "error rate: " << err << '\n';
      out << "confusion: tp " << tp << ", tn " << tn << ", fp " << fp << ", fn " << fn << '\n';
    }
  } else {
    const double value = rmse(model, data);
    const double raw =
        value * std::sqrt(model.preprocessing.target_standardized
                              ? model.preprocessing.target_variance
                              : 1.0);
    if (opt.json_out) {
      json j;
      j["samples"] = data.n();
      j["rmse_standardized"] = value;
      j["rmse"] = raw;
      out << j.dump(2) << '\n';
    } else {
      out << "samples: " << data.n() << '\n';
      out << "rmse (standardized targets): " << value << '\n';
      out << "rmse (original scale): " << raw << '\n';
    }
  }
  return 0;
}

struct XorOptions {
  int train_n = 1000;
  int test_n = 1000;
  int dims = 20;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int grid_steps = 41;
  CommonTrainFlags flags;
  bool json_out = false;
};

inline int cmd_xor(const XorOptions& opt, std::ostream& out) {
  const Dataset train_data = generate_xor(opt.train_n, opt.dims, opt.seed);
  const Dataset test_data = generate_xor(opt.test_n, opt.dims, opt.seed + 1);

  PipelineConfig cfg;
  cfg.scheme = PartitionScheme::fixed_threshold;
  cfg.fixed_threshold = 0.0;
  for (int d = 1; d < opt.dims; ++d) cfg.fixed_features.push_back(d);
  cfg.train = opt.flags.to_config(LossKind::logistic);
  auto [model, report] = fit_pipeline(train_data, cfg);

  PipelineConfig baseline_cfg = cfg;
  baseline_cfg.scheme = PartitionScheme::none;
  baseline_cfg.fixed_features.clear();
  auto [baseline, baseline_report] = fit_pipeline(train_data, baseline_cfg);

  const double test_err = error_rate(model, test_data);
  const double baseline_err = error_rate(baseline, test_data);

  const std::filesystem::path dir(opt.out_dir);
  const std::string model_path = (dir / "xor_model.json").string();
  save_model(model, model_path, train_meta(cfg.train, report));

  // Score surface over the first two coordinates, everything else at zero.
  const std::string grid_path = (dir / "xor_scores.csv").string();
  Matrix grid(static_cast<Eigen::Index>(opt.grid_steps) * opt.grid_steps, 3);
  Vector x = Vector::Zero(opt.dims);
  Eigen::Index row = 0;
  for (int i = 0; i < opt.grid_steps; ++i) {
    for (int j = 0; j < opt.grid_steps; ++j) {
      x[0] = -1.0 + 2.0 * i / (opt.grid_steps - 1);
      x[1] = -1.0 + 2.0 * j / (opt.grid_steps - 1);
      grid(row, 0) = x[0];
      grid(row, 1) = x[1];
      grid(row, 2) = predict_score(model, x);
      ++row;
    }
  }
  write_csv_file(grid_path, {"x1", "x2", "score"}, grid);

  if (opt.json_out) {
    json j;
    j["train_error"] = error_rate(model, train_data);
    j["test_error"] = test_err;
    j["baseline_train_error"] = error_rate(baseline, train_data);
    j["baseline_test_error"] = baseline_err;
    j["iterations"] = report.iterations;
    j["active_local_columns"] = report.active_local_columns;
    j["model_path"] = model_path;
    j["scores_path"] = grid_path;
    out << j.dump(2) << '\n';
  } else {
    out << "partition model:  train error " << error_rate(model, train_data) << ", test error "
        << test_err << '\n';
    out << "global baseline:  train error " << error_rate(baseline, train_data)
        << ", test error " << baseline_err << '\n';
    out << "iterations: " << report.iterations << ", active local columns: "
        << report.active_local_columns << '\n';
    out << "wrote " << model_path << " and " << grid_path << '\n';
  }
  return 0;
}

struct BenchOptions {
  std::string in;
  std::string target = "target";
  Task task = Task::classification;
  LossKind loss = LossKind::logistic;
  bool loss_given = false;
  std::string name;
  int reps = 10;
  double test_fraction = 0.2;
  int folds = 10;
  int quantiles = 5;
  std::string scale = "none";
  bool intercept = false;
  std::uint64_t seed = 0;
  std::vector<double> lambda0_grid;
  std::vector<double> lambdaP_grid;
  int max_iters = 1000;
  int cv_max_iters = 0;  // 0 = same as max_iters
  std::string out_csv;
  double compare_budget = 0.0;
  std::string trace_out = "warmstart_traces.csv";
  bool json_out = false;
};

inline void write_trace_rows(std::vector<double>& flat, const TrainReport& report, double variant) {
  for (size_t i = 0; i < report.trace.size(); ++i) {
    const IterationRecord& rec = report.trace[i];
    flat.push_back(variant);
    flat.push_back(static_cast<double>(i + 1));
    flat.push_back(rec.seconds);
    flat.push_back(rec.objective);
    flat.push_back(rec.train_metric);
  }
}

inline int cmd_bench(const BenchOptions& opt, std::ostream& out) {
  const CsvTable table = read_csv_file(opt.in);
  const Dataset data = dataset_from_table(table, opt.target, opt.task);
  const LossKind loss = opt.loss_given ? opt.loss : default_loss(opt.task);
  const std::string name =
      opt.name.empty() ? std::filesystem::path(opt.in).stem().string() : opt.name;

  PipelineConfig base;
  base.scheme = PartitionScheme::quantile;
  base.quantile_count = opt.quantiles;
  base.scaling = opt.scale == "minmax" ? FeatureScaling::minmax : FeatureScaling::none;
  base.add_intercept = opt.intercept;
  base.train.loss = loss;
  base.train.max_iterations = opt.max_iters;

  const std::vector<double> l0 = opt.lambda0_grid.empty() ? default_lambda_grid() : opt.lambda0_grid;
  const std::vector<double> lP = opt.lambdaP_grid.empty() ? default_lambda_grid() : opt.lambdaP_grid;

  const int n = static_cast<int>(data.n());
  const int test_count = std::max(1, static_cast<int>(std::lround(opt.test_fraction * n)));
  if (test_count >= n) throw std::invalid_argument("bench: test fraction leaves no training data");

  json reps_json = json::array();
  std::vector<double> metrics;
  std::vector<double> rep_rows;
  double active_total = 0.0;

  for (int rep = 0; rep < opt.reps; ++rep) {
    const std::uint64_t rep_seed = opt.seed + static_cast<std::uint64_t>(rep);
    std::vector<int> idx = detail::shuffled_indices(n, rep_seed);
    std::vector<int> test_rows(idx.begin(), idx.begin() + test_count);
    std::vector<int> train_rows(idx.begin() + test_count, idx.end());
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    const Dataset train_set = subset_rows(data, train_rows);
    const Dataset test_set = subset_rows(data, test_rows);

    PipelineConfig cv_cfg = base;
    if (opt.cv_max_iters > 0) cv_cfg.train.max_iterations = opt.cv_max_iters;
    const CvResult cv = cross_validate(train_set, cv_cfg, l0, lP, opt.folds, rep_seed);

    PipelineConfig final_cfg = base;
    final_cfg.train.lambda0 = cv.best().lambda0;
    final_cfg.train.lambdaP = cv.best().lambdaP;
    auto [model, report] = fit_pipeline(train_set, final_cfg);
    const double metric = opt.task == Task::classification ? error_rate(model, test_set)
                                                           : rmse(model, test_set);
    metrics.push_back(metric);
    active_total += report.active_local_columns;

    json r;
    r["rep"] = rep;
    r["seed"] = rep_seed;
    r["lambda0"] = cv.best().lambda0;
    r["lambdaP"] = cv.best().lambdaP;
    r["cv_metric"] = cv.best().mean_metric;
    r["test_metric"] = metric;
    r["active_local_columns"] = report.active_local_columns;
    r["iterations"] = report.iterations;
    reps_json.push_back(r);

    rep_rows.push_back(static_cast<double>(rep));
    rep_rows.push_back(static_cast<double>(rep_seed));
    rep_rows.push_back(cv.best().lambda0);
    rep_rows.push_back(cv.best().lambdaP);
    rep_rows.push_back(metric);
    rep_rows.push_back(static_cast<double>(report.active_local_columns));

    if (!opt.json_out) {
      out << "rep " << rep << ": best lambda0 " << cv.best().lambda0 << ", lambdaP "
          << cv.best().lambdaP << ", test " << (opt.task == Task::classification ? "error " : "rmse ")
          << metric << '\n';
    }
  }

  double mean = 0.0;
  for (double m : metrics) mean += m;
  mean /= static_cast<double>(metrics.size());
  double var = 0.0;
  for (double m : metrics) var += (m - mean) * (m - mean);
  const double stddev = metrics.size() > 1 ? std::sqrt(var / (static_cast<double>(metrics.size()) - 1.0)) : 0.0;

  if (!opt.out_csv.empty()) {
    Matrix rows(static_cast<Eigen::Index>(opt.reps), 6);
    for (int i = 0; i < opt.reps; ++i) {
      for (int j = 0; j < 6; ++j) rows(i, j) = rep_rows[static_cast<size_t>(i) * 6 + j];
    }
    write_csv_file(opt.out_csv, {"rep", "seed", "lambda0", "lambdaP", "test_metric",
                                 "active_local_columns"},
                   rows);
  }

  json compare;
  if (opt.compare_budget > 0.0) {
    // Same budget, same problem, warm start on and off; traces land in a CSV.
    PipelineConfig warm_cfg = base;
    warm_cfg.train.lambda0 = l0[l0.size() / 2];
    warm_cfg.train.lambdaP = lP[lP.size() / 2];
    warm_cfg.train.time_budget_seconds = opt.compare_budget;
    warm_cfg.train.use_warm_start = true;
    PipelineConfig cold_cfg = warm_cfg;
    cold_cfg.train.use_warm_start = false;

    auto [warm_model, warm_report] = fit_pipeline(data, warm_cfg);
    auto [cold_model, cold_report] = fit_pipeline(data, cold_cfg);

    std::vector<double> flat;
    write_trace_rows(flat, warm_report, 1.0);
    write_trace_rows(flat, cold_report, 0.0);
    Matrix rows(static_cast<Eigen::Index>(flat.size() / 5), 5);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) rows(i, j) = flat[static_cast<size_t>(i) * 5 + static_cast<size_t>(j)];
    }
    write_csv_file(opt.trace_out, {"warm_start", "iteration", "seconds", "objective",
                                   "train_metric"},
                   rows);

    const double warm_metric = opt.task == Task::classification ? error_rate(warm_model, data)
                                                                : rmse(warm_model, data);
    const double cold_metric = opt.task == Task::classification ? error_rate(cold_model, data)
                                                                : rmse(cold_model, data);
    compare["budget_seconds"] = opt.compare_budget;
    compare["warm"] = {{"objective", warm_report.final_objective},
                       {"train_metric", warm_metric},
                       {"iterations", warm_report.iterations}};
    compare["cold"] = {{"objective", cold_report.final_objective},
                       {"train_metric", cold_metric},
                       {"iterations", cold_report.iterations}};
    compare["trace_path"] = opt.trace_out;
    if (!opt.json_out) {
      out << "warm start compare (budget " << opt.compare_budget << "s): warm objective "
          << warm_report.final_objective << ", train metric " << warm_metric
          << "; cold objective " << cold_report.final_objective << ", train metric "
          << cold_metric << '\n';
      out << "wrote traces to " << opt.trace_out << '\n';
    }
  }

  if (opt.json_out) {
    json j;
    j["dataset"] = name;
    j["task"] = to_string(opt.task);
    j["loss"] = to_string(loss);
    j["reps"] = reps_json;
    j["mean_metric"] = mean;
    j["std_metric"] = stddev;
    j["mean_active_local_columns"] = active_total / static_cast<double>(opt.reps);
    if (!compare.empty()) j["warm_start_compare"] = compare;
    out << j.dump(2) << '\n';
  } else {
    out << name << " (" << to_string(opt.task) << ", " << opt.reps << " splits): "
        << (opt.task == Task::classification ? "error " : "rmse ") << mean << " (" << stddev
        << "), mean active local columns " << active_total / static_cast<double>(opt.reps)
        << '\n';
  }
  return 0;
}

}  // namespace cli_detail

/// Command line front end. Returns the process exit code: 0 success, 1 usage
/// errors, 2 input or data errors, 3 numeric failures.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::map<std::string, Task> task_names{{"classification", Task::classification},
                                               {"regression", Task::regression}};
  const std::map<std::string, LossKind> loss_names{{"logistic", LossKind::logistic},
                                                   {"squared", LossKind::squared}};

  CLI::App app{"global plus partition-wise linear models with structured sparsity"};
  app.name("partwise");
  app.require_subcommand(1);

  cli_detail::TrainOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "fit a model on a CSV dataset");
  train_cmd->add_option("--in", train_opt.in, "training CSV with a header line")->required();
  train_cmd->add_option("--out", train_opt.out, "where the model JSON goes")->required();
  train_cmd->add_option("--task", train_opt.task, "learning task")
      ->required()
      ->transform(CLI::CheckedTransformer(task_names, CLI::ignore_case));
  CLI::Option* train_loss = train_cmd->add_option("--loss", train_opt.loss,
                                                  "loss (default: logistic for classification, "
                                                  "squared for regression)")
                                ->transform(CLI::CheckedTransformer(loss_names, CLI::ignore_case));
  train_cmd->add_option("--target", train_opt.target, "name of the target column")
      ->capture_default_str();
  train_cmd->add_option("--partitions", train_opt.partitions, "partition scheme")
      ->check(CLI::IsMember({"quantile", "none"}))
      ->capture_default_str();
  train_cmd->add_option("--quantiles", train_opt.quantiles, "quantile count per feature")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  train_cmd->add_option("--scale", train_opt.scale, "feature scaling")
      ->check(CLI::IsMember({"none", "minmax"}))
      ->capture_default_str();
  train_cmd->add_flag("--intercept", train_opt.intercept, "append a constant feature");
  train_opt.flags.attach(train_cmd);
  train_cmd->add_flag("--json", train_opt.json_out, "machine readable summary");

  cli_detail::PredictOptions predict_opt;
  CLI::App* predict_cmd = app.add_subcommand("predict", "apply a model to a feature CSV");
  predict_cmd->add_option("--model", predict_opt.model_path, "model JSON file")->required();
  predict_cmd->add_option("--in", predict_opt.in, "feature CSV")->required();
  predict_cmd->add_option("--out", predict_opt.out, "prediction CSV to write")->required();
  predict_cmd->add_option("--target", predict_opt.target,
                          "target column to drop when present")
      ->capture_default_str();

  cli_detail::EvalOptions eval_opt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a model against labeled data");
  eval_cmd->add_option("--model", eval_opt.model_path, "model JSON file")->required();
  eval_cmd->add_option("--in", eval_opt.in, "labeled CSV")->required();
  eval_cmd->add_option("--target", eval_opt.target, "name of the target column")
      ->capture_default_str();
  eval_cmd->add_option("--task", eval_opt.task, "expected task, checked against the model")
      ->check(CLI::IsMember({"classification", "regression"}));
  eval_cmd->add_flag("--json", eval_opt.json_out, "machine readable summary");

  cli_detail::XorOptions xor_opt;
  CLI::App* xor_cmd = app.add_subcommand("xor", "synthetic sign-parity experiment");
  xor_cmd->add_option("--train-n", xor_opt.train_n, "training samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  xor_cmd->add_option("--test-n", xor_opt.test_n, "test samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  xor_cmd->add_option("--dims", xor_opt.dims, "feature count")
      ->check(CLI::Range(2, 10000))
      ->capture_default_str();
  xor_cmd->add_option("--seed", xor_opt.seed, "rng seed")->capture_default_str();
  xor_cmd->add_option("--out-dir", xor_opt.out_dir, "directory for model and score files")
      ->capture_default_str();
  xor_cmd->add_option("--grid-steps", xor_opt.grid_steps, "score surface resolution")
      ->check(CLI::Range(2, 2001))
      ->capture_default_str();
  xor_opt.flags.attach(xor_cmd);
  xor_cmd->add_flag("--json", xor_opt.json_out, "machine readable summary");

  cli_detail::BenchOptions bench_opt;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "seeded splits, cross-validated grid search, test metrics");
  bench_cmd->add_option("--in", bench_opt.in, "labeled CSV")->required();
  bench_cmd->add_option("--target", bench_opt.target, "name of the target column")
      ->capture_default_str();
  bench_cmd->add_option("--task", bench_opt.task, "learning task")
      ->required()
      ->transform(CLI::CheckedTransformer(task_names, CLI::ignore_case));
  CLI::Option* bench_loss = bench_cmd->add_option("--loss", bench_opt.loss, "loss override")
                                ->transform(CLI::CheckedTransformer(loss_names, CLI::ignore_case));
  bench_cmd->add_option("--name", bench_opt.name, "dataset label in the report");
  bench_cmd->add_option("--reps", bench_opt.reps, "number of seeded train/test splits")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  bench_cmd->add_option("--test-fraction", bench_opt.test_fraction, "held out share per split")
      ->check(CLI::Range(0.01, 0.9))
      ->capture_default_str();
  bench_cmd->add_option("--folds", bench_opt.folds, "cross validation folds")
      ->check(CLI::Range(2, 100))
      ->capture_default_str();
  bench_cmd->add_option("--quantiles", bench_opt.quantiles, "quantile count per feature")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  bench_cmd->add_option("--scale", bench_opt.scale, "feature scaling")
      ->check(CLI::IsMember({"none", "minmax"}))
      ->capture_default_str();
  bench_cmd->add_flag("--intercept", bench_opt.intercept, "append a constant feature");
  bench_cmd->add_option("--seed", bench_opt.seed, "base seed for splits and folds")
      ->capture_default_str();
  bench_cmd->add_option("--lambda0-grid", bench_opt.lambda0_grid, "comma separated grid")
      ->delimiter(',');
  bench_cmd->add_option("--lambdaP-grid", bench_opt.lambdaP_grid, "comma separated grid")
      ->delimiter(',');
  bench_cmd->add_option("--max-iters", bench_opt.max_iters, "iteration cap for final fits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--cv-max-iters", bench_opt.cv_max_iters,
                        "iteration cap during grid search (0: same as --max-iters)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_opt.out_csv, "per-split results CSV");
  bench_cmd->add_option("--compare-budget", bench_opt.compare_budget,
                        "extra warm versus cold start run with this wall budget in seconds")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--trace-out", bench_opt.trace_out, "trace CSV for the comparison")
      ->capture_default_str();
  bench_cmd->add_flag("--json", bench_opt.json_out, "machine readable summary");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("partwise");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    train_opt.loss_given = train_loss->count() > 0;
    bench_opt.loss_given = bench_loss->count() > 0;
    if (train_cmd->parsed()) return cli_detail::cmd_train(train_opt, out);
    if (predict_cmd->parsed()) return cli_detail::cmd_predict(predict_opt, out);
    if (eval_cmd->parsed()) return cli_detail::cmd_eval(eval_opt, out);
    if (xor_cmd->parsed()) return cli_detail::cmd_xor(xor_opt, out);
    if (bench_cmd->parsed()) return cli_detail::cmd_bench(bench_opt, out);
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace partwise
