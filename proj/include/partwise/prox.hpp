#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "partwise/core.hpp"

namespace partwise {

/// Euclidean projection onto {c : ||c||_1 <= radius}. Sort the magnitudes,
/// find the largest support size whose shared shift keeps every kept entry
/// positive, then soft-threshold by that shift. O(D log D), exact for interior
/// points.
inline Vector project_l1_ball(const Eigen::Ref<const Vector>& v, double radius) {
  if (radius < 0.0) throw std::invalid_argument("project_l1_ball: negative radius");
  if (radius == 0.0) return Vector::Zero(v.size());
  if (v.cwiseAbs().sum() <= radius) return v;

  std::vector<double> u(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<size_t>(i)] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());

  double cumulative = 0.0;
  double theta = 0.0;
  for (size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] > candidate) theta = candidate;
  }

  Vector w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - theta;
    w[i] = mag > 0.0 ? (v[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return w;
}

/// Elementwise soft threshold sgn(b) max(|b| - tau, 0) on every column.
inline Matrix prox_l1(const Matrix& B, double tau) {
  if (tau < 0.0) throw std::invalid_argument("prox_l1: negative threshold");
  Matrix out(B.rows(), B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
      const double b = B(i, j);
      const double mag = std::abs(b) - tau;
      out(i, j) = mag > 0.0 ? (b > 0.0 ? mag : -mag) : 0.0;
    }
  }
  return out;
}

/// Prox of kappa * (sum of per-column max norms) over the local columns.
/// Column 0 passes through untouched. Each local column is its own prox
/// problem, solved through the dual: subtract the projection onto the L1 ball
/// of radius kappa.
inline Matrix prox_group_linf(const Matrix& B, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("prox_group_linf: negative weight");
  Matrix out(B.rows(), B.cols());
  out.col(0) = B.col(0);
  for (Eigen::Index p = 1; p < B.cols(); ++p) {
    out.col(p) = B.col(p) - project_l1_ball(B.col(p), kappa);
  }
  return out;
}

/// Prox of eta * (lambdaP * group term + lambda0 * L1 term): the group prox
/// followed by the elementwise soft threshold. The order matters and this one
/// gives the exact prox of the sum.
inline Matrix prox_composed(const Matrix& B, double eta, double lambdaP, double lambda0) {
  if (eta <= 0.0) throw std::invalid_argument("prox_composed: step size must be positive");
  if (lambdaP < 0.0 || lambda0 < 0.0) {
    throw std::invalid_argument("prox_composed: negative regularization weight");
  }
  return prox_l1(prox_group_linf(B, eta * lambdaP), eta * lambda0);
}

}  // namespace partwise
