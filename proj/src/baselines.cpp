#include "dnaol/baselines.hpp"

namespace dnaol {

CrcModel make_crc(const Matrix& D, const std::vector<int>& labels,
                  double ridge_weight) {
  if (static_cast<Eigen::Index>(labels.size()) != D.cols())
    throw std::invalid_argument("make_crc: label count does not match samples");
  if (ridge_weight <= 0.0)
    throw std::invalid_argument("make_crc: ridge weight must be positive");
  CrcModel model;
  model.dictionary = D;
  model.ridge_weight = ridge_weight;
  const int C = count_classes(labels);
  model.class_columns.resize(C);
  for (std::size_t i = 0; i < labels.size(); ++i)
    model.class_columns[labels[i]].push_back(static_cast<int>(i));

  Matrix G = D.transpose() * D;
  G.diagonal().array() += ridge_weight;
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("make_crc: Gram factorization failed");
  model.projection = llt.solve(D.transpose());
  return model;
}

Prediction classify(const CrcModel& model, Eigen::Ref<const Vector> x) {
  const int C = model.num_classes();
  if (C == 0) throw std::invalid_argument("classify: empty model");
  const Vector code = model.projection * x;
  Prediction pred;
  pred.scores.resize(C);
  for (int c = 0; c < C; ++c) {
    Vector recon = Vector::Zero(x.size());
    double code_norm_sq = 0.0;
    for (int j : model.class_columns[c]) {
      recon.noalias() += model.dictionary.col(j) * code[j];
      code_norm_sq += code[j] * code[j];
    }
    const double denom = std::max(std::sqrt(code_norm_sq), 1e-300);
    pred.scores[c] = (x - recon).norm() / denom;
  }
  int best = 0;
  for (int c = 1; c < C; ++c)
    if (pred.scores[c] < pred.scores[best]) best = c;
  pred.label = best;
  return pred;
}

NearestMeanModel make_nearest_mean(const Matrix& X,
                                   const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != X.cols())
    throw std::invalid_argument("make_nearest_mean: label count mismatch");
  const int C = count_classes(labels);
  NearestMeanModel model;
  model.means = Matrix::Zero(X.rows(), C);
  std::vector<int> counts(C, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    model.means.col(labels[i]) += X.col(static_cast<Eigen::Index>(i));
    ++counts[labels[i]];
  }
  for (int c = 0; c < C; ++c) {
    if (counts[c] == 0)
      throw std::invalid_argument("make_nearest_mean: class " +
                                  std::to_string(c) + " has no samples");
    model.means.col(c) /= counts[c];
  }
  return model;
}

Prediction classify(const NearestMeanModel& model, Eigen::Ref<const Vector> x) {
  const int C = model.num_classes();
  if (C == 0) throw std::invalid_argument("classify: empty model");
  Prediction pred;
  pred.scores.resize(C);
  for (int c = 0; c < C; ++c)
    pred.scores[c] = (x - model.means.col(c)).squaredNorm();
  int best = 0;
  for (int c = 1; c < C; ++c)
    if (pred.scores[c] < pred.scores[best]) best = c;
  pred.label = best;
  return pred;
}

}  // namespace dnaol
