#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "partwise/core.hpp"

namespace partwise {

/// Feature and target transforms baked into a fitted model. Features map
/// through a per-coordinate affine x' = scale * x + offset (identity when the
/// vectors are empty), optionally followed by a constant 1 appended as an
/// intercept coordinate. Regression targets may be standardized to mean 0 and
/// unit variance; predictions are mapped back at the end.
struct Preprocessing {
  Vector feature_scale;   // empty for identity
  Vector feature_offset;  // same length as feature_scale
  bool add_intercept = false;
  bool target_standardized = false;
  double target_mean = 0.0;
  double target_variance = 1.0;

  bool identity_features() const { return feature_scale.size() == 0 && !add_intercept; }

  Vector apply(const Eigen::Ref<const Vector>& x) const {
    Vector scaled;
    if (feature_scale.size() > 0) {
      if (x.size() != feature_scale.size()) {
        throw std::invalid_argument("Preprocessing: input has " + std::to_string(x.size()) +
                                    " features, transform expects " +
                                    std::to_string(feature_scale.size()));
      }
      scaled = feature_scale.cwiseProduct(x) + feature_offset;
    } else {
      scaled = x;
    }
    if (!add_intercept) return scaled;
    Vector out(scaled.size() + 1);
    out.head(scaled.size()) = scaled;
    out[scaled.size()] = 1.0;
    return out;
  }

  Matrix apply_rows(const Matrix& features) const {
    Matrix scaled;
    if (feature_scale.size() > 0) {
      if (features.cols() != feature_scale.size()) {
        throw std::invalid_argument("Preprocessing: input has " +
                                    std::to_string(features.cols()) +
                                    " features, transform expects " +
                                    std::to_string(feature_scale.size()));
      }
      scaled = features * feature_scale.asDiagonal();
      scaled.rowwise() += feature_offset.transpose();
    } else {
      scaled = features;
    }
    if (!add_intercept) return scaled;
    Matrix out(scaled.rows(), scaled.cols() + 1);
    out.leftCols(scaled.cols()) = scaled;
    out.col(scaled.cols()).setOnes();
    return out;
  }

  double standardize_target(double y) const {
    if (!target_standardized) return y;
    return (y - target_mean) / std::sqrt(target_variance);
  }

  double destandardize_target(double v) const {
    if (!target_standardized) return v;
    return target_mean + v * std::sqrt(target_variance);
  }
};

/// A fitted partition-wise linear model. Weights live in the preprocessed
/// feature space: column 0 is the global predictor, column p >= 1 belongs to
/// partitions.specs[p]. Activeness and scores are evaluated on preprocessed
/// inputs; only regression labels are mapped back to the original target scale.
struct Model {
  Task task = Task::classification;
  PartitionSet partitions;
  Matrix weights;  // D' x (P+1), D' = input_dims (+1 with intercept)
  Preprocessing preprocessing;
  int input_dims = 0;  // raw feature count expected at prediction time

  int model_dims() const { return static_cast<int>(weights.rows()); }

  void validate() const {
    if (input_dims < 1) throw std::invalid_argument("Model: input_dims must be positive");
    const int expect = input_dims + (preprocessing.add_intercept ? 1 : 0);
    if (weights.rows() != expect) {
      throw std::invalid_argument("Model: weight rows " + std::to_string(weights.rows()) +
                                  " do not match transformed dimension " + std::to_string(expect));
    }
    if (weights.cols() != partitions.size()) {
      throw std::invalid_argument("Model: weight columns " + std::to_string(weights.cols()) +
                                  " do not match partition count " +
                                  std::to_string(partitions.size()));
    }
    if (!weights.allFinite()) throw std::invalid_argument("Model: non-finite weight");
    if (preprocessing.feature_scale.size() != preprocessing.feature_offset.size()) {
      throw std::invalid_argument("Model: feature scale/offset length mismatch");
    }
    if (preprocessing.feature_scale.size() > 0 && preprocessing.feature_scale.size() != input_dims) {
      throw std::invalid_argument("Model: feature transform length does not match input_dims");
    }
    if (preprocessing.target_standardized && !(preprocessing.target_variance > 0.0)) {
      throw std::invalid_argument("Model: target variance must be positive");
    }
    partitions.validate(expect);
  }
};

/// Raw score g(x) = sum_p f_p(x') a_p . x' in the preprocessed space.
inline double predict_score(const Model& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.input_dims) {
    throw std::invalid_argument("predict_score: input has " + std::to_string(x.size()) +
                                " features, model expects " + std::to_string(model.input_dims));
  }
  const Vector xt = model.preprocessing.apply(x);
  double g = xt.dot(model.weights.col(0));
  for (int p = 1; p < model.partitions.size(); ++p) {
    if (activeness(model.partitions[p], xt) == 1) g += xt.dot(model.weights.col(p));
  }
  return g;
}

inline Vector predict_scores(const Model& model, const Matrix& features) {
  if (features.cols() != model.input_dims) {
    throw std::invalid_argument("predict_scores: input has " + std::to_string(features.cols()) +
                                " features, model expects " + std::to_string(model.input_dims));
  }
  const Matrix xt = model.preprocessing.apply_rows(features);
  Vector scores = xt * model.weights.col(0);
  for (int p = 1; p < model.partitions.size(); ++p) {
    const PartitionSpec& s = model.partitions[p];
    const Vector contrib = xt * model.weights.col(p);
    for (Eigen::Index i = 0; i < xt.rows(); ++i) {
      const double v = xt(i, s.feature);
      const bool active = s.direction == Direction::greater ? (v > s.threshold) : (v <= s.threshold);
      if (active) scores[i] += contrib[i];
    }
  }
  return scores;
}

/// Classification: sign of the score with ties mapped to +1.
/// Regression: score mapped back to the original target scale.
inline double predict_label(const Model& model, const Eigen::Ref<const Vector>& x) {
  const double g = predict_score(model, x);
  if (model.task == Task::classification) return g >= 0.0 ? 1.0 : -1.0;
  return model.preprocessing.destandardize_target(g);
}

inline Vector predict_labels(const Model& model, const Matrix& features) {
  Vector scores = predict_scores(model, features);
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (model.task == Task::classification) {
      scores[i] = scores[i] >= 0.0 ? 1.0 : -1.0;
    } else {
      scores[i] = model.preprocessing.destandardize_target(scores[i]);
    }
  }
  return scores;
}

}  // namespace partwise
