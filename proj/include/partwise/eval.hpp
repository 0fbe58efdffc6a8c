#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "partwise/core.hpp"
#include "partwise/model.hpp"
#include "partwise/pipeline.hpp"

namespace partwise {

/// Misclassification rate of sign predictions against +1/-1 targets.
inline double error_rate(const Model& model, const Dataset& data) {
  if (data.n() < 1) throw std::invalid_argument("error_rate: empty dataset");
  const Vector scores = predict_scores(model, data.features);
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double label = scores[i] >= 0.0 ? 1.0 : -1.0;
    if (label != data.targets[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.n());
}

/// Root mean squared error between raw scores and targets mapped into the
/// model's standardized target space.
inline double rmse(const Model& model, const Dataset& data) {
  if (data.n() < 1) throw std::invalid_argument("rmse: empty dataset");
  const Vector scores = predict_scores(model, data.features);
  double total = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double r = scores[i] - model.preprocessing.standardize_target(data.targets[i]);
    total += r * r;
  }
  return std::sqrt(total / static_cast<double>(data.n()));
}

namespace detail {

/// Fixed mapping from engine output to [0, 1): the top 53 bits scaled down.
/// Keeps streams identical across standard libraries.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<int> shuffled_indices(int n, std::uint64_t seed) {
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

}  // namespace detail

/// Noiseless XOR of the first two coordinate signs, embedded in `dims`
/// uniform [-1, 1] coordinates. Matching signs are labeled +1.
inline Dataset generate_xor(int n, int dims = 20, std::uint64_t seed = 0) {
  if (n < 1 || dims < 2) throw std::invalid_argument("generate_xor: need n >= 1 and dims >= 2");
  std::mt19937_64 rng(seed);
  Dataset data;
  data.task = Task::classification;
  data.features.resize(n, dims);
  data.targets.resize(n);
  data.feature_kinds.assign(static_cast<size_t>(dims), FeatureKind::continuous);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) {
      data.features(i, d) = 2.0 * detail::uniform_unit(rng) - 1.0;
    }
    const bool left = data.features(i, 0) > 0.0;
    const bool right = data.features(i, 1) > 0.0;
    data.targets[i] = left == right ? 1.0 : -1.0;
  }
  return data;
}

/// Seeded split of 0..n-1 into `folds` disjoint index sets with sizes within
/// one of each other: shuffle, then deal round robin.
inline std::vector<std::vector<int>> fold_assignment(int n, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("fold_assignment: need at least 2 folds");
  if (n < folds) throw std::invalid_argument("fold_assignment: more folds than samples");
  const std::vector<int> idx = detail::shuffled_indices(n, seed);
  std::vector<std::vector<int>> out(static_cast<size_t>(folds));
  for (int i = 0; i < n; ++i) {
    out[static_cast<size_t>(i % folds)].push_back(idx[static_cast<size_t>(i)]);
  }
  return out;
}

inline Dataset subset_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.task = data.task;
  out.feature_kinds = data.feature_kinds;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.dims());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
    out.targets[static_cast<Eigen::Index>(i)] = data.targets[rows[i]];
  }
  return out;
}

struct CvCell {
  double lambda0 = 0.0;
  double lambdaP = 0.0;
  std::vector<double> fold_metrics;
  double mean_metric = 0.0;
};

struct CvResult {
  std::vector<CvCell> cells;
  int best_index = -1;

  const CvCell& best() const { return cells[static_cast<size_t>(best_index)]; }
};

inline std::vector<double> default_lambda_grid() { return {1e-4, 1e-3, 1e-2, 1e-1}; }

/// Grid search by k-fold cross validation. The metric is the error rate for
/// classification and the rmse for regression, averaged over validation folds.
/// Exact mean ties go to the larger (lambda0, lambdaP) pair, compared
/// lexicographically, so the sparser model wins.
inline CvResult cross_validate(const Dataset& data, const PipelineConfig& base,
                               const std::vector<double>& lambda0_grid,
                               const std::vector<double>& lambdaP_grid, int folds = 10,
                               std::uint64_t seed = 0) {
  data.validate();
  if (lambda0_grid.empty() || lambdaP_grid.empty()) {
    throw std::invalid_argument("cross_validate: empty grid");
  }
  const auto fold_rows = fold_assignment(static_cast<int>(data.n()), folds, seed);

  std::vector<Dataset> train_sets, val_sets;
  train_sets.reserve(static_cast<size_t>(folds));
  val_sets.reserve(static_cast<size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows;
    for (int g = 0; g < folds; ++g) {
      if (g == f) continue;
      train_rows.insert(train_rows.end(), fold_rows[static_cast<size_t>(g)].begin(),
                        fold_rows[static_cast<size_t>(g)].end());
    }
    train_sets.push_back(subset_rows(data, train_rows));
    val_sets.push_back(subset_rows(data, fold_rows[static_cast<size_t>(f)]));
  }

  CvResult result;
  for (double l0 : lambda0_grid) {
    for (double lP : lambdaP_grid) {
      CvCell cell;
      cell.lambda0 = l0;
      cell.lambdaP = lP;
      double total = 0.0;
      for (int f = 0; f < folds; ++f) {
        PipelineConfig cfg = base;
        cfg.train.lambda0 = l0;
        cfg.train.lambdaP = lP;
        auto [model, report] = fit_pipeline(train_sets[static_cast<size_t>(f)], cfg);
        const double metric = data.task == Task::classification
                                  ? error_rate(model, val_sets[static_cast<size_t>(f)])
                                  : rmse(model, val_sets[static_cast<size_t>(f)]);
        cell.fold_metrics.push_back(metric);
        total += metric;
      }
      cell.mean_metric = total / static_cast<double>(folds);
      result.cells.push_back(std::move(cell));
    }
  }

  for (size_t i = 0; i < result.cells.size(); ++i) {
    if (result.best_index < 0) {
      result.best_index = static_cast<int>(i);
      continue;
    }
    const CvCell& cur = result.cells[i];
    const CvCell& best = result.cells[static_cast<size_t>(result.best_index)];
    if (cur.mean_metric < best.mean_metric ||
        (cur.mean_metric == best.mean_metric &&
         (cur.lambda0 > best.lambda0 ||
          (cur.lambda0 == best.lambda0 && cur.lambdaP > best.lambdaP)))) {
      result.best_index = static_cast<int>(i);
    }
  }
  return result;
}

/// High-probability bound on the expected loss: empirical mean plus a
/// complexity term that grows with the logarithm of the weight count, plus the
/// usual confidence term. L is the Lipschitz constant of the loss.
inline double generalization_bound(double empirical_mean, int n, int partitions, int dims,
                                   double lipschitz, double delta) {
  if (n < 1) throw std::invalid_argument("generalization_bound: need n >= 1");
  if (partitions < 0 || dims < 1) {
    throw std::invalid_argument("generalization_bound: bad partition or dimension count");
  }
  if (lipschitz <= 0.0) throw std::invalid_argument("generalization_bound: bad Lipschitz constant");
  if (delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("generalization_bound: delta must be in (0, 1)");
  }
  const double weights = static_cast<double>(dims) * partitions + partitions + dims;
  const double complexity = (2.0 * std::sqrt(2.0) * lipschitz / std::sqrt(n)) *
                            (2.0 + std::sqrt(std::log(weights)));
  const double confidence = std::sqrt(std::log(1.0 / delta) / (2.0 * n));
  return empirical_mean + complexity + confidence;
}

}  // namespace partwise
