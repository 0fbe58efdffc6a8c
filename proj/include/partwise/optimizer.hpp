#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "partwise/core.hpp"
#include "partwise/loss.hpp"
#include "partwise/model.hpp"
#include "partwise/prox.hpp"

namespace partwise {

struct TrainConfig {
  LossKind loss = LossKind::logistic;
  double lambda0 = 0.0;
  double lambdaP = 0.0;
  double initial_step = 1.0;
  int max_iterations = 1000;
  double termination_gap = 1e-9;  // absolute objective gap
  int termination_window = 10;    // consecutive small gaps before stopping
  int max_step_halvings = 60;     // consecutive rejections before giving up
  bool use_fista = true;
  bool use_warm_start = true;
  double time_budget_seconds = 0.0;  // 0 disables the budget

  void validate() const {
    if (lambda0 < 0.0 || lambdaP < 0.0) {
      throw std::invalid_argument("TrainConfig: negative regularization weight");
    }
    if (!(initial_step > 0.0)) throw std::invalid_argument("TrainConfig: initial_step must be positive");
    if (max_iterations < 1) throw std::invalid_argument("TrainConfig: max_iterations must be >= 1");
    if (!(termination_gap >= 0.0)) throw std::invalid_argument("TrainConfig: bad termination_gap");
    if (termination_window < 1) throw std::invalid_argument("TrainConfig: bad termination_window");
    if (max_step_halvings < 1) throw std::invalid_argument("TrainConfig: bad max_step_halvings");
    if (time_budget_seconds < 0.0) throw std::invalid_argument("TrainConfig: negative time budget");
  }
};

enum class StopReason { converged, max_iterations, time_budget };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::time_budget: return "time_budget";
  }
  return "unknown";
}

/// One row of the optimization trace. The objective is always the one of the
/// prox output produced this iteration, whether or not the step was accepted.
struct IterationRecord {
  double objective = 0.0;
  bool accepted = false;
  double step = 0.0;
  double seconds = 0.0;       // wall time since train() entry
  double train_metric = 0.0;  // error rate (classification) or rmse (regression)
};

struct TrainReport {
  double final_objective = 0.0;
  int iterations = 0;
  StopReason reason = StopReason::max_iterations;
  int active_local_columns = 0;
  double warm_start_seconds = 0.0;
  std::vector<IterationRecord> trace;

  std::vector<double> objective_trace() const {
    std::vector<double> out;
    out.reserve(trace.size());
    for (const IterationRecord& rec : trace) out.push_back(rec.objective);
    return out;
  }
};

inline Matrix gradient_step(const Matrix& A, const Matrix& grad, double eta) {
  return A - eta * grad;
}

/// Momentum update. Returns the next extrapolated point and the next momentum
/// scalar. With s = 1 the extrapolation weight is zero and the output equals V.
inline std::pair<Matrix, double> fista_update(const Matrix& V, const Matrix& V_prev, double s) {
  const double s_next = (1.0 + std::sqrt(1.0 + 4.0 * s * s)) / 2.0;
  Matrix extrapolated = V + ((s - 1.0) / s_next) * (V - V_prev);
  return {std::move(extrapolated), s_next};
}

/// Step size test: the data loss at the candidate must sit below the quadratic
/// model of the loss around the base point.
inline bool backtracking_check(const Matrix& candidate, const Matrix& base,
                               const Matrix& grad_base, double loss_candidate, double loss_base,
                               double eta) {
  const Matrix diff = candidate - base;
  const double linear = grad_base.cwiseProduct(diff).sum();
  const double quadratic = diff.squaredNorm() / (2.0 * eta);
  return loss_candidate <= loss_base + linear + quadratic;
}

namespace detail {

struct TrainClock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

inline double trace_metric(Task task, const Vector& targets, const Vector& s) {
  if (task == Task::classification) {
    Eigen::Index wrong = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double label = s[i] >= 0.0 ? 1.0 : -1.0;
      if (label != targets[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(s.size());
  }
  return std::sqrt((s - targets).squaredNorm() / static_cast<double>(s.size()));
}

}  // namespace detail

inline std::pair<Model, TrainReport> train(const Dataset& data, const PartitionSet& partitions,
                                           const TrainConfig& config);

/// L1-regularized fit of the global column alone, used to seed the full
/// problem. Returns the fitted column.
inline Vector warm_start_global(const Dataset& data, double lambda0, const TrainConfig& config) {
  TrainConfig sub = config;
  sub.lambda0 = lambda0;
  sub.lambdaP = 0.0;
  sub.use_warm_start = false;
  auto [model, report] = train(data, PartitionSet{}, sub);
  return model.weights.col(0);
}

/// Proximal gradient descent on the partition-wise objective, optionally
/// accelerated and warm started. Deterministic: same inputs, same iterates.
inline std::pair<Model, TrainReport> train(const Dataset& data, const PartitionSet& partitions,
                                           const TrainConfig& config) {
  config.validate();
  data.validate();
  partitions.validate(data.dims());
  if (data.task == Task::regression && config.loss == LossKind::logistic) {
    throw std::invalid_argument("train: logistic loss needs classification targets");
  }

  const detail::TrainClock clock;
  const bool budgeted = config.time_budget_seconds > 0.0;

  const ActivenessMatrix F = activeness_matrix(partitions, data.features);
  const Eigen::Index dims = data.dims();
  const int cols = partitions.size();
  const RowMajorMatrix feature_rows = data.features;

  Matrix A = Matrix::Zero(dims, cols);

  TrainReport report;
  if (config.use_warm_start && partitions.local_count() > 0) {
    TrainConfig sub = config;
    sub.use_warm_start = false;
    sub.lambdaP = 0.0;
    if (budgeted) {
      // Leave room for the main loop: the seeding fit gets half the remainder.
      sub.time_budget_seconds = std::max(0.5 * (config.time_budget_seconds - clock.elapsed()), 1e-3);
    }
    auto [seed_model, seed_report] = train(data, PartitionSet{}, sub);
    A.col(0) = seed_model.weights.col(0);
    report.warm_start_seconds = clock.elapsed();
  }

  Matrix V_prev = A;
  double s = 1.0;
  double eta = config.initial_step;

  Vector scores_base = scores(A, data.features, F);
  double loss_base = data_loss(config.loss, data.targets, scores_base);
  Matrix grad = scatter_gradient(score_residuals(config.loss, data.targets, scores_base),
                                 feature_rows, F);

  int streak = 0;
  int halvings = 0;
  bool have_last = false;
  double last_objective = 0.0;
  StopReason reason = StopReason::max_iterations;
  report.trace.reserve(static_cast<size_t>(config.max_iterations));

  for (int t = 1; t <= config.max_iterations; ++t) {
    if (budgeted && clock.elapsed() >= config.time_budget_seconds) {
      reason = StopReason::time_budget;
      break;
    }

    const Matrix B = gradient_step(A, grad, eta);
    const Matrix V = prox_composed(B, eta, config.lambdaP, config.lambda0);
    const Vector scores_v = scores(V, data.features, F);
    const double loss_v = data_loss(config.loss, data.targets, scores_v);
    const double obj = loss_v + penalty(V, config.lambda0, config.lambdaP);
    if (!std::isfinite(obj)) {
      throw numeric_error("train: non-finite objective at iteration " + std::to_string(t));
    }

    const bool accepted = backtracking_check(V, A, grad, loss_v, loss_base, eta);
    report.trace.push_back({obj, accepted, eta, clock.elapsed(),
                            detail::trace_metric(data.task, data.targets, scores_v)});

    if (accepted) {
      halvings = 0;
      if (config.use_fista) {
        auto [extrapolated, s_next] = fista_update(V, V_prev, s);
        A = std::move(extrapolated);
        s = s_next;
      } else {
        A = V;
      }
      V_prev = V;
      scores_base = scores(A, data.features, F);
      loss_base = data_loss(config.loss, data.targets, scores_base);
      grad = scatter_gradient(score_residuals(config.loss, data.targets, scores_base),
                              feature_rows, F);
    } else {
      ++halvings;
      if (halvings > config.max_step_halvings) {
        throw numeric_error("train: step size collapsed after " + std::to_string(halvings) +
                            " halvings at iteration " + std::to_string(t));
      }
      eta *= 0.5;
    }

    if (have_last) {
      streak = std::abs(obj - last_objective) < config.termination_gap ? streak + 1 : 0;
      if (streak >= config.termination_window) {
        reason = StopReason::converged;
        break;
      }
    }
    have_last = true;
    last_objective = obj;
  }

  Model model;
  model.task = data.task;
  model.partitions = partitions;
  model.weights = V_prev;
  model.input_dims = static_cast<int>(dims);
  model.validate();

  report.iterations = static_cast<int>(report.trace.size());
  report.reason = reason;
  const Vector final_scores = scores(model.weights, data.features, F);
  report.final_objective = data_loss(config.loss, data.targets, final_scores) +
                           penalty(model.weights, config.lambda0, config.lambdaP);
  for (int p = 1; p < cols; ++p) {
    if (!model.weights.col(p).isZero(0.0)) ++report.active_local_columns;
  }
  return {std::move(model), std::move(report)};
}

}  // namespace partwise
