#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dnaol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Default tolerance below which a feature entry counts as exactly zero.
constexpr double kCosparsityTol = 1e-12;

//! Entrywise selector s_lambda(v) = lambda * sgn(v) * max(|v| - 1, 0).
//!
//! The dead-zone threshold is fixed at 1; lambda only scales the output of
//! the shrinkage.  lambda is clamped to be nonnegative on construction.
struct FeatureSelector {
  double lambda = 1.0;

  explicit FeatureSelector(double l = 1.0) : lambda(l < 0.0 ? 0.0 : l) {}

  double operator()(double v) const {
    const double m = std::abs(v) - 1.0;
    if (m <= 0.0) return 0.0;
    const double s = lambda * m;
    return v < 0.0 ? -s : s;
  }

  //! Apply the selector entrywise in place.
  void apply(Matrix& M) const {
    double* p = M.data();
    const Eigen::Index sz = M.size();
    for (Eigen::Index i = 0; i < sz; ++i) p[i] = (*this)(p[i]);
  }
};

//! Soft threshold sgn(v) * max(|v| - w, 0), the proximal map of w*|.|.
inline double soft_threshold(double v, double w) {
  const double m = std::abs(v) - w;
  if (m <= 0.0) return 0.0;
  return v < 0.0 ? -m : m;
}

//! Analysis feature model: f = s_lambda(A x) with A of shape p x n.
struct AnalysisModel {
  Matrix A;                 // p x n analysis operator
  FeatureSelector selector; // scalar selector shared by all p rows

  Eigen::Index feature_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return A.cols(); }
};

//! Canonical matrix-vector product used by every feature-extraction path.
//!
//! Accumulates columns of A in ascending index order so that batched,
//! per-column and per-entry extraction round identically.
Vector apply_operator(const Matrix& A, Eigen::Ref<const Vector> x);

//! Features for a batch; X is n x N (samples as columns), result is p x N.
Matrix extract_features(const AnalysisModel& model, const Matrix& X);

//! Features for a single sample; bitwise equal to the matching column of the
//! batched result.
Vector extract_features_column(const AnalysisModel& model,
                               Eigen::Ref<const Vector> x);

//! Single feature entry f_j = s_lambda(<A.row(j), x>).
double feature_entry(const AnalysisModel& model, Eigen::Ref<const Vector> x,
                     Eigen::Index j);

//! Number of entries with |f_i| <= tol.
Eigen::Index cosparsity(Eigen::Ref<const Vector> f, double tol = kCosparsityTol);

//! Max abs difference between the unit-scale selector (lambda = 1) and the
//! soft threshold with weight w, over the entries of v.  Exactly zero when
//! w = 1 by construction.
double prox_gap(Eigen::Ref<const Vector> v, double w);

}  // namespace dnaol
