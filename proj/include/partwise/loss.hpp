#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "partwise/core.hpp"

namespace partwise {

enum class LossKind { logistic, squared };

/// Pointwise loss on one margin/score. The logistic branch is written so the
/// exp argument is never positive.
inline double loss_value(LossKind kind, double y, double g) {
  if (kind == LossKind::squared) {
    const double r = y - g;
    return 0.5 * r * r;
  }
  const double m = y * g;
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

/// Derivative of loss_value with respect to the score g.
inline double loss_derivative(LossKind kind, double y, double g) {
  if (kind == LossKind::squared) return g - y;
  const double m = y * g;
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return -y * (e / (1.0 + e));
  }
  return -y / (1.0 + std::exp(m));
}

/// Scores g(x_n) for every sample. Columns of A that are exactly zero are
/// skipped; they cannot contribute. Column order is ascending either way, so
/// the accumulation order never depends on which columns are zero.
inline Vector scores(const Matrix& A, const Matrix& features, const ActivenessMatrix& F) {
  if (A.rows() != features.cols() || A.cols() != F.columns() || features.rows() != F.n()) {
    throw std::invalid_argument("scores: shape mismatch between weights, features, activeness");
  }
  Vector s = Vector::Zero(features.rows());
  for (Eigen::Index p = 0; p < A.cols(); ++p) {
    if (A.col(p).isZero(0.0)) continue;
    const Vector t = features * A.col(p);
    if (p == 0) {
      s += t;
    } else {
      s += F.values.col(p).cwiseProduct(t);
    }
  }
  return s;
}

inline double data_loss(LossKind kind, const Vector& targets, const Vector& s) {
  if (targets.size() != s.size()) throw std::invalid_argument("data_loss: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += loss_value(kind, targets[i], s[i]);
  return total;
}

/// r_n = dloss/dg at (y_n, g_n). Computed once per gradient evaluation and
/// shared by every partition column.
inline Vector score_residuals(LossKind kind, const Vector& targets, const Vector& s) {
  if (targets.size() != s.size()) throw std::invalid_argument("score_residuals: length mismatch");
  Vector r(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) r[i] = loss_derivative(kind, targets[i], s[i]);
  return r;
}

/// Second stage of the gradient: column p collects r_n x_n over the samples
/// the rule is active on, in ascending sample order. A column whose rule fires
/// on no sample stays zero.
inline Matrix scatter_gradient(const Vector& residuals, const RowMajorMatrix& feature_rows,
                               const ActivenessMatrix& F) {
  Matrix grad = Matrix::Zero(feature_rows.cols(), F.columns());
  for (Eigen::Index p = 0; p < F.columns(); ++p) {
    auto col = grad.col(p);
    for (int i : F.active_rows[static_cast<size_t>(p)]) {
      col.noalias() += residuals[i] * feature_rows.row(i).transpose();
    }
  }
  return grad;
}

/// Gradient of the summed data loss in the weights. Stage one turns the scores
/// into per-sample residuals, stage two scatters them into the columns.
inline Matrix loss_gradient(const Matrix& A, const Dataset& data, const ActivenessMatrix& F,
                            LossKind kind) {
  const Vector s = scores(A, data.features, F);
  const Vector r = score_residuals(kind, data.targets, s);
  const RowMajorMatrix rows = data.features;
  return scatter_gradient(r, rows, F);
}

/// Group sparsity term: the max norm of every local column. The global column
/// is never grouped.
inline double group_penalty(const Matrix& A) {
  double total = 0.0;
  for (Eigen::Index p = 1; p < A.cols(); ++p) total += A.col(p).cwiseAbs().maxCoeff();
  return total;
}

inline double penalty(const Matrix& A, double lambda0, double lambdaP) {
  return lambdaP * group_penalty(A) + lambda0 * A.cwiseAbs().sum();
}

/// Full training objective: summed loss plus both sparsity terms.
inline double objective(const Matrix& A, const Dataset& data, const ActivenessMatrix& F,
                        LossKind kind, double lambda0, double lambdaP) {
  if (lambda0 < 0.0 || lambdaP < 0.0) {
    throw std::invalid_argument("objective: negative regularization weight");
  }
  const Vector s = scores(A, data.features, F);
  return data_loss(kind, data.targets, s) + penalty(A, lambda0, lambdaP);
}

}  // namespace partwise
