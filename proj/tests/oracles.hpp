// Independent reference implementations used only by tests. Everything here
// avoids the production code paths on purpose: different algorithms, different
// summation styles, so agreement means something.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "partwise/core.hpp"
#include "partwise/loss.hpp"

namespace oracles {

using partwise::ActivenessMatrix;
using partwise::LossKind;
using partwise::Matrix;
using partwise::Vector;

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// ---------------------------------------------------------------------------
// L1 ball projection, two independent ways.

/// Exhaustive KKT solve for dimensions up to 3: try every support set, solve
/// for the shared shift, keep the candidate whose complementary slackness
/// holds. Exact up to scalar arithmetic.
inline Vector l1_project_enumerate(const Vector& v, double radius) {
  const int n = static_cast<int>(v.size());
  if (n > 3) throw std::invalid_argument("l1_project_enumerate: supports dims <= 3 only");
  if (radius == 0.0) return Vector::Zero(n);
  double norm1 = 0.0;
  for (int i = 0; i < n; ++i) norm1 += std::abs(v[i]);
  if (norm1 <= radius) return v;

  for (int mask = 1; mask < (1 << n); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) {
        sum += std::abs(v[i]);
        ++count;
      }
    }
    const double theta = (sum - radius) / count;
    if (theta < 0.0) continue;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const bool in = mask & (1 << i);
      const double mag = std::abs(v[i]);
      if (in && mag - theta <= 0.0) ok = false;
      if (!in && mag > theta) ok = false;
    }
    if (!ok) continue;
    Vector w = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) {
        const double mag = std::abs(v[i]) - theta;
        w[i] = v[i] > 0.0 ? mag : -mag;
      }
    }
    return w;
  }
  throw std::logic_error("l1_project_enumerate: no KKT point found");
}

/// Any dimension: bisect the shift in the piecewise-linear norm equation.
inline Vector l1_project_bisect(const Vector& v, double radius) {
  if (radius == 0.0) return Vector::Zero(v.size());
  const double norm1 = v.cwiseAbs().sum();
  if (norm1 <= radius) return v;
  double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double total = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) total += std::max(std::abs(v[i]) - mid, 0.0);
    (total > radius ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  Vector w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v[i]) - theta, 0.0);
    w[i] = v[i] > 0.0 ? mag : (v[i] < 0.0 ? -mag : 0.0);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Combined prox, solved per column from scratch.

/// One column of argmin_A 0.5||A-B||^2 + kappa * max_p ||a_p||_inf + tau ||A||_1,
/// for a local column. Reduction: soft threshold by tau, then cap magnitudes
/// at the m solving sum_i max(s_i - m, 0) = kappa (m = 0 when the soft
/// thresholded mass is below kappa). The cap level is found by bisection.
inline Vector prox_column_reference(const Vector& b, double kappa, double tau) {
  const Eigen::Index n = b.size();
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = std::max(std::abs(b[i]) - tau, 0.0);

  Vector a(n);
  if (kappa == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) a[i] = b[i] > 0.0 ? s[i] : (b[i] < 0.0 ? -s[i] : 0.0);
    return a;
  }

  double cap = 0.0;
  if (s.sum() > kappa) {
    double lo = 0.0, hi = s.maxCoeff();
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      double excess = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) excess += std::max(s[i] - mid, 0.0);
      (excess > kappa ? lo : hi) = mid;
    }
    cap = 0.5 * (lo + hi);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::min(s[i], cap);
    a[i] = b[i] > 0.0 ? mag : (b[i] < 0.0 ? -mag : 0.0);
  }
  return a;
}

/// Full-matrix reference prox. Column 0 only sees the elementwise term.
inline Matrix prox_reference(const Matrix& B, double eta, double lambdaP, double lambda0) {
  const double kappa = eta * lambdaP;
  const double tau = eta * lambda0;
  Matrix out(B.rows(), B.cols());
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    const double b = B(i, 0);
    const double mag = std::max(std::abs(b) - tau, 0.0);
    out(i, 0) = b > 0.0 ? mag : (b < 0.0 ? -mag : 0.0);
  }
  for (Eigen::Index p = 1; p < B.cols(); ++p) {
    out.col(p) = prox_column_reference(B.col(p), kappa, tau);
  }
  return out;
}

/// Value of the prox objective, for certifying candidates by perturbation.
inline double prox_objective(const Matrix& A, const Matrix& B, double eta, double lambdaP,
                             double lambda0) {
  double value = 0.5 * (A - B).squaredNorm();
  for (Eigen::Index p = 1; p < A.cols(); ++p) {
    value += eta * lambdaP * A.col(p).cwiseAbs().maxCoeff();
  }
  value += eta * lambda0 * A.cwiseAbs().sum();
  return value;
}

// ---------------------------------------------------------------------------
// Gradients.

/// Scores by plain triple loop, no column skipping, no library calls.
inline Vector naive_scores(const Matrix& A, const Matrix& X, const ActivenessMatrix& F) {
  Vector s = Vector::Zero(X.rows());
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    for (Eigen::Index p = 0; p < A.cols(); ++p) {
      if (F.values(n, p) == 0.0) continue;
      double dot = 0.0;
      for (Eigen::Index d = 0; d < X.cols(); ++d) dot += A(d, p) * X(n, d);
      s[n] += dot;
    }
  }
  return s;
}

/// Dense gradient: ascending sample order inside every column, residuals
/// supplied by the caller.
inline Matrix naive_gradient_from_residuals(const Vector& residuals, const Matrix& X,
                                            const ActivenessMatrix& F) {
  Matrix g = Matrix::Zero(X.cols(), F.columns());
  for (Eigen::Index p = 0; p < F.columns(); ++p) {
    for (Eigen::Index n = 0; n < X.rows(); ++n) {
      if (F.values(n, p) == 0.0) continue;
      for (Eigen::Index d = 0; d < X.cols(); ++d) g(d, p) += residuals[n] * X(n, d);
    }
  }
  return g;
}

inline Matrix naive_gradient(const Matrix& A, const Matrix& X, const Vector& y,
                             const ActivenessMatrix& F, LossKind kind) {
  const Vector s = naive_scores(A, X, F);
  Vector r(s.size());
  for (Eigen::Index n = 0; n < s.size(); ++n) {
    if (kind == LossKind::squared) {
      r[n] = s[n] - y[n];
    } else {
      const double m = y[n] * s[n];
      r[n] = m >= 0.0 ? -y[n] * (std::exp(-m) / (1.0 + std::exp(-m)))
                      : -y[n] / (1.0 + std::exp(m));
    }
  }
  return naive_gradient_from_residuals(r, X, F);
}

/// Central difference of the summed data loss, one weight at a time.
inline Matrix central_difference_gradient(const Matrix& A, const Matrix& X, const Vector& y,
                                          const ActivenessMatrix& F, LossKind kind, double h) {
  Matrix g(A.rows(), A.cols());
  for (Eigen::Index p = 0; p < A.cols(); ++p) {
    for (Eigen::Index d = 0; d < A.rows(); ++d) {
      Matrix up = A, down = A;
      up(d, p) += h;
      down(d, p) -= h;
      const Vector su = naive_scores(up, X, F);
      const Vector sd = naive_scores(down, X, F);
      double lu = 0.0, ld = 0.0;
      for (Eigen::Index n = 0; n < y.size(); ++n) {
        lu += partwise::loss_value(kind, y[n], su[n]);
        ld += partwise::loss_value(kind, y[n], sd[n]);
      }
      g(d, p) = (lu - ld) / (2.0 * h);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Generalization bound in extended precision.

inline long double bound_reference(long double empirical, long double n, long double partitions,
                                   long double dims, long double lipschitz, long double delta) {
  const long double weights = dims * partitions + partitions + dims;
  const long double complexity =
      (2.0L * std::sqrt(2.0L) * lipschitz / std::sqrt(n)) * (2.0L + std::sqrt(std::log(weights)));
  const long double confidence = std::sqrt(std::log(1.0L / delta) / (2.0L * n));
  return empirical + complexity + confidence;
}

}  // namespace oracles
