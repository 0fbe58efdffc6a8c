#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "partwise/core.hpp"

namespace partwise {

/// A feature is binary when every observed value is 0 or 1.
inline std::vector<FeatureKind> infer_feature_kinds(const Matrix& features) {
  std::vector<FeatureKind> kinds(static_cast<size_t>(features.cols()), FeatureKind::continuous);
  for (Eigen::Index d = 0; d < features.cols(); ++d) {
    bool binary = true;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      const double v = features(i, d);
      if (v != 0.0 && v != 1.0) {
        binary = false;
        break;
      }
    }
    if (binary) kinds[static_cast<size_t>(d)] = FeatureKind::binary;
  }
  return kinds;
}

/// Empirical quantile with linear interpolation between order statistics
/// (the h = (n-1)p convention). `sorted` must be ascending.
inline double empirical_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("empirical_quantile: p outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const size_t lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

/// Data-driven partition set. Continuous features contribute a `greater` rule
/// at each interior k/q quantile, deduplicated and kept only when strictly
/// between the observed min and max. Binary features with both values observed
/// contribute a pair of rules splitting at 0.5, one side each.
inline PartitionSet quantile_partitions(const Matrix& features,
                                        const std::vector<FeatureKind>& kinds, int q = 5) {
  if (features.rows() < 1 || features.cols() < 1) {
    throw std::invalid_argument("quantile_partitions: empty feature matrix");
  }
  if (kinds.size() != static_cast<size_t>(features.cols())) {
    throw std::invalid_argument("quantile_partitions: kinds length does not match dimensions");
  }
  if (q < 2) throw std::invalid_argument("quantile_partitions: need q >= 2");

  PartitionSet out;
  std::vector<double> column(static_cast<size_t>(features.rows()));
  for (Eigen::Index d = 0; d < features.cols(); ++d) {
    if (kinds[static_cast<size_t>(d)] == FeatureKind::binary) {
      bool saw0 = false, saw1 = false;
      for (Eigen::Index i = 0; i < features.rows(); ++i) {
        (features(i, d) == 0.0 ? saw0 : saw1) = true;
      }
      if (saw0 && saw1) {
        out.add(PartitionSpec::threshold_rule(static_cast<int>(d), 0.5, Direction::greater));
        out.add(PartitionSpec::threshold_rule(static_cast<int>(d), 0.5, Direction::less_or_equal));
      }
      continue;
    }

    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      column[static_cast<size_t>(i)] = features(i, d);
    }
    std::sort(column.begin(), column.end());
    const double lo = column.front();
    const double hi = column.back();
    double last_added = std::numeric_limits<double>::quiet_NaN();
    for (int k = 1; k < q; ++k) {
      const double t = empirical_quantile(column, static_cast<double>(k) / q);
      if (!(t > lo && t < hi)) continue;
      if (t == last_added) continue;
      out.add(PartitionSpec::threshold_rule(static_cast<int>(d), t, Direction::greater));
      last_added = t;
    }
  }
  return out;
}

/// One `greater` rule per listed feature, all at the same threshold.
inline PartitionSet fixed_threshold_partitions(const std::vector<int>& features, double threshold,
                                               Direction direction = Direction::greater) {
  PartitionSet out;
  for (int d : features) {
    if (d < 0) throw std::invalid_argument("fixed_threshold_partitions: negative feature index");
    out.add(PartitionSpec::threshold_rule(d, threshold, direction));
  }
  return out;
}

}  // namespace partwise
