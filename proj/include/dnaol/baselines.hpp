#pragma once

#include "dnaol/classify.hpp"

namespace dnaol {

//! Collaborative representation: code every query against the full training
//! dictionary with a ridge penalty, score classes by the reconstruction
//! residual of their part of the code, normalized by the code's norm.
struct CrcModel {
  Matrix dictionary;   // n x N training samples, as given
  Matrix projection;   // (D^T D + w I)^{-1} D^T, precomputed
  std::vector<std::vector<int>> class_columns;
  double ridge_weight = 1e-3;

  int num_classes() const { return static_cast<int>(class_columns.size()); }
};

CrcModel make_crc(const Matrix& D, const std::vector<int>& labels,
                  double ridge_weight = 1e-3);

Prediction classify(const CrcModel& model, Eigen::Ref<const Vector> x);

inline EvalReport evaluate(const CrcModel& model, const Matrix& X,
                           const std::vector<int>& labels) {
  return evaluate_model(model, X, labels);
}

//! Nearest class mean over the training samples.
struct NearestMeanModel {
  Matrix means;  // n x C

  int num_classes() const { return static_cast<int>(means.cols()); }
};

NearestMeanModel make_nearest_mean(const Matrix& X,
                                   const std::vector<int>& labels);

//! argmin_c ||x - mean_c||^2, ties to the smallest index.
Prediction classify(const NearestMeanModel& model, Eigen::Ref<const Vector> x);

inline EvalReport evaluate(const NearestMeanModel& model, const Matrix& X,
                           const std::vector<int>& labels) {
  return evaluate_model(model, X, labels);
}

}  // namespace dnaol
