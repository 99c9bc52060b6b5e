#include "dnaol/nacm.hpp"

namespace dnaol {

Vector apply_operator(const Matrix& A, Eigen::Ref<const Vector> x) {
  if (x.size() != A.cols())
    throw std::invalid_argument("apply_operator: x has length " +
                                std::to_string(x.size()) + ", operator expects " +
                                std::to_string(A.cols()));
  Vector t = Vector::Zero(A.rows());
  for (Eigen::Index k = 0; k < A.cols(); ++k)
    t.noalias() += A.col(k) * x[k];
  return t;
}

Vector extract_features_column(const AnalysisModel& model,
                               Eigen::Ref<const Vector> x) {
  Vector f = apply_operator(model.A, x);
  for (Eigen::Index j = 0; j < f.size(); ++j) f[j] = model.selector(f[j]);
  return f;
}

Matrix extract_features(const AnalysisModel& model, const Matrix& X) {
  if (X.rows() != model.A.cols())
    throw std::invalid_argument("extract_features: X has " +
                                std::to_string(X.rows()) + " rows, operator expects " +
                                std::to_string(model.A.cols()));
  Matrix F(model.A.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.cols(); ++i)
    F.col(i) = extract_features_column(model, X.col(i));
  return F;
}

double feature_entry(const AnalysisModel& model, Eigen::Ref<const Vector> x,
                     Eigen::Index j) {
  if (j < 0 || j >= model.A.rows())
    throw std::invalid_argument("feature_entry: row index out of range");
  if (x.size() != model.A.cols())
    throw std::invalid_argument("feature_entry: dimension mismatch");
  // Same k-ascending accumulation as apply_operator, restricted to row j.
  double t = 0.0;
  for (Eigen::Index k = 0; k < model.A.cols(); ++k) t += model.A(j, k) * x[k];
  return model.selector(t);
}

Eigen::Index cosparsity(Eigen::Ref<const Vector> f, double tol) {
  if (tol < 0.0) throw std::invalid_argument("cosparsity: tol must be >= 0");
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) <= tol) ++count;
  return count;
}

double prox_gap(Eigen::Ref<const Vector> v, double w) {
  const FeatureSelector unit(1.0);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double d = std::abs(unit(v[i]) - soft_threshold(v[i], w));
    if (d > gap) gap = d;
  }
  return gap;
}

}  // namespace dnaol
