#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "partwise/core.hpp"
#include "partwise/model.hpp"
#include "partwise/optimizer.hpp"
#include "partwise/partitions.hpp"

namespace partwise {

enum class PartitionScheme { none, quantile, fixed_threshold };
enum class FeatureScaling { none, minmax };

struct PipelineConfig {
  PartitionScheme scheme = PartitionScheme::quantile;
  int quantile_count = 5;
  std::vector<int> fixed_features;  // fixed_threshold scheme only
  double fixed_threshold = 0.0;
  FeatureScaling scaling = FeatureScaling::none;
  bool add_intercept = false;
  bool standardize_target = true;          // regression only
  std::vector<FeatureKind> kind_override;  // empty = infer from the data
  TrainConfig train;
};

/// Minmax scaling to [-1, 1], fitted per continuous feature. Binary features
/// are left on {0, 1} so threshold rules keep their meaning; constant features
/// are left untouched.
inline void fit_minmax(Preprocessing& prep, const Matrix& features,
                       const std::vector<FeatureKind>& kinds) {
  const Eigen::Index dims = features.cols();
  prep.feature_scale = Vector::Ones(dims);
  prep.feature_offset = Vector::Zero(dims);
  for (Eigen::Index d = 0; d < dims; ++d) {
    if (kinds[static_cast<size_t>(d)] == FeatureKind::binary) continue;
    const double lo = features.col(d).minCoeff();
    const double hi = features.col(d).maxCoeff();
    if (hi == lo) continue;
    prep.feature_scale[d] = 2.0 / (hi - lo);
    prep.feature_offset[d] = -(hi + lo) / (hi - lo);
  }
}

/// Preprocess, build partitions, train. The returned model owns the fitted
/// transforms, so it applies to raw inputs directly.
inline std::pair<Model, TrainReport> fit_pipeline(const Dataset& raw, const PipelineConfig& cfg) {
  raw.validate();

  std::vector<FeatureKind> kinds = cfg.kind_override;
  if (kinds.empty()) {
    kinds = infer_feature_kinds(raw.features);
  } else if (kinds.size() != static_cast<size_t>(raw.dims())) {
    throw std::invalid_argument("fit_pipeline: kind_override length does not match dimensions");
  }

  Preprocessing prep;
  prep.add_intercept = cfg.add_intercept;
  if (cfg.scaling == FeatureScaling::minmax) fit_minmax(prep, raw.features, kinds);
  if (raw.task == Task::regression && cfg.standardize_target) {
    const double mean = raw.targets.mean();
    const double variance = (raw.targets.array() - mean).square().mean();
    prep.target_standardized = true;
    prep.target_mean = mean;
    prep.target_variance = variance > 0.0 ? variance : 1.0;
  }

  Dataset transformed;
  transformed.task = raw.task;
  transformed.features = prep.apply_rows(raw.features);
  transformed.feature_kinds = kinds;
  if (cfg.add_intercept) transformed.feature_kinds.push_back(FeatureKind::continuous);
  transformed.targets = raw.targets;
  if (prep.target_standardized) {
    for (Eigen::Index i = 0; i < transformed.targets.size(); ++i) {
      transformed.targets[i] = prep.standardize_target(transformed.targets[i]);
    }
  }

  PartitionSet partitions;
  switch (cfg.scheme) {
    case PartitionScheme::none:
      break;
    case PartitionScheme::quantile:
      partitions =
          quantile_partitions(transformed.features, transformed.feature_kinds, cfg.quantile_count);
      break;
    case PartitionScheme::fixed_threshold:
      partitions = fixed_threshold_partitions(cfg.fixed_features, cfg.fixed_threshold);
      break;
  }

  auto [model, report] = train(transformed, partitions, cfg.train);
  model.preprocessing = prep;
  model.input_dims = static_cast<int>(raw.dims());
  model.validate();
  return {std::move(model), std::move(report)};
}

}  // namespace partwise
