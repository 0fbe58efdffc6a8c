#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace partwise {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Row-major mirror of the feature matrix, used where per-sample rows are gathered.
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when an optimization run produces non-finite values.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Task { classification, regression };
enum class FeatureKind { continuous, binary };
enum class PartitionKind { global, threshold };
enum class Direction { greater, less_or_equal };

/// One activeness rule. The global rule is active everywhere; a threshold rule
/// splits the input space along a single coordinate (strictly greater, or the
/// complement less-or-equal).
struct PartitionSpec {
  PartitionKind kind = PartitionKind::global;
  int feature = -1;        // threshold rules only
  double threshold = 0.0;  // threshold rules only
  Direction direction = Direction::greater;

  static PartitionSpec global() { return PartitionSpec{}; }

  static PartitionSpec threshold_rule(int feature, double threshold,
                                      Direction direction = Direction::greater) {
    PartitionSpec s;
    s.kind = PartitionKind::threshold;
    s.feature = feature;
    s.threshold = threshold;
    s.direction = direction;
    return s;
  }

  friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

/// Evaluates one activeness rule on a single input. Threshold comparisons are
/// strict on the `greater` side: a value equal to the threshold is inactive.
inline int activeness(const PartitionSpec& spec, const Eigen::Ref<const Vector>& x) {
  if (spec.kind == PartitionKind::global) return 1;
  if (spec.feature < 0 || spec.feature >= x.size()) {
    throw std::invalid_argument("activeness: feature index " + std::to_string(spec.feature) +
                                " out of range for dimension " + std::to_string(x.size()));
  }
  const double v = x[spec.feature];
  if (spec.direction == Direction::greater) return v > spec.threshold ? 1 : 0;
  return v <= spec.threshold ? 1 : 0;
}

/// Ordered list of activeness rules; index 0 is always the global rule.
struct PartitionSet {
  std::vector<PartitionSpec> specs{PartitionSpec::global()};

  int size() const { return static_cast<int>(specs.size()); }
  int local_count() const { return size() - 1; }

  const PartitionSpec& operator[](int p) const { return specs[static_cast<size_t>(p)]; }

  void add(const PartitionSpec& spec) { specs.push_back(spec); }

  /// Index of the first local spec matching (feature, threshold, direction), or -1.
  int find_local(int feature, double threshold, Direction direction) const {
    for (int p = 1; p < size(); ++p) {
      const PartitionSpec& s = specs[static_cast<size_t>(p)];
      if (s.feature == feature && s.threshold == threshold && s.direction == direction) return p;
    }
    return -1;
  }

  void validate(Eigen::Index dims) const {
    if (specs.empty() || specs.front().kind != PartitionKind::global) {
      throw std::invalid_argument("PartitionSet: index 0 must hold the global rule");
    }
    for (size_t i = 1; i < specs.size(); ++i) {
      const PartitionSpec& s = specs[i];
      if (s.kind == PartitionKind::global) {
        throw std::invalid_argument("PartitionSet: duplicate global rule at index " +
                                    std::to_string(i));
      }
      if (s.feature < 0 || s.feature >= dims) {
        throw std::invalid_argument("PartitionSet: feature index out of range at index " +
                                    std::to_string(i));
      }
      for (size_t j = i + 1; j < specs.size(); ++j) {
        if (specs[i] == specs[j]) {
          throw std::invalid_argument("PartitionSet: identical rules at indices " +
                                      std::to_string(i) + " and " + std::to_string(j));
        }
      }
    }
  }
};

struct Dataset {
  Matrix features;  // N x D
  Vector targets;   // length N
  Task task = Task::classification;
  std::vector<FeatureKind> feature_kinds;  // length D

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dims() const { return features.cols(); }

  void validate() const {
    if (features.rows() < 1 || features.cols() < 1) {
      throw std::invalid_argument("Dataset: need at least one sample and one feature");
    }
    if (targets.size() != features.rows()) {
      throw std::invalid_argument("Dataset: targets length does not match sample count");
    }
    if (!features.allFinite() || !targets.allFinite()) {
      throw std::invalid_argument("Dataset: non-finite value in features or targets");
    }
    if (feature_kinds.size() != static_cast<size_t>(features.cols())) {
      throw std::invalid_argument("Dataset: feature_kinds length does not match dimensions");
    }
    if (task == Task::classification) {
      for (Eigen::Index i = 0; i < targets.size(); ++i) {
        if (targets[i] != 1.0 && targets[i] != -1.0) {
          throw std::invalid_argument("Dataset: classification target at row " +
                                      std::to_string(i) + " is not +1/-1");
        }
      }
    }
    for (Eigen::Index d = 0; d < features.cols(); ++d) {
      if (feature_kinds[static_cast<size_t>(d)] != FeatureKind::binary) continue;
      for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const double v = features(i, d);
        if (v != 0.0 && v != 1.0) {
          throw std::invalid_argument("Dataset: binary feature column " + std::to_string(d) +
                                      " holds a value outside {0,1}");
        }
      }
    }
  }
};

/// Cached activeness values for a dataset: entry (n, p) is f_p(x_n).
/// Column 0 (the global rule) is all ones. active_rows lists, per column,
/// the sample indices with f_p(x_n) = 1 in ascending order.
struct ActivenessMatrix {
  Matrix values;  // N x (P+1), entries in {0, 1}
  std::vector<std::vector<int>> active_rows;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index columns() const { return values.cols(); }
};

inline ActivenessMatrix activeness_matrix(const PartitionSet& partitions, const Matrix& features) {
  if (features.rows() < 1 || features.cols() < 1) {
    throw std::invalid_argument("activeness_matrix: empty feature matrix");
  }
  partitions.validate(features.cols());

  const Eigen::Index n = features.rows();
  const int cols = partitions.size();
  ActivenessMatrix out;
  out.values.setZero(n, cols);
  out.active_rows.assign(static_cast<size_t>(cols), {});

  out.values.col(0).setOnes();
  out.active_rows[0].resize(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.active_rows[0][static_cast<size_t>(i)] = static_cast<int>(i);

  for (int p = 1; p < cols; ++p) {
    const PartitionSpec& s = partitions[p];
    std::vector<int>& rows = out.active_rows[static_cast<size_t>(p)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = features(i, s.feature);
      const bool active =
          s.direction == Direction::greater ? (v > s.threshold) : (v <= s.threshold);
      if (active) {
        out.values(i, p) = 1.0;
        rows.push_back(static_cast<int>(i));
      }
    }
  }
  return out;
}

}  // namespace partwise
