#pragma once

#include <chrono>
#include <iosfwd>
#include <vector>

#include "dnaol/train.hpp"

namespace dnaol {

struct Prediction {
  int label = 0;
  Vector scores;  // per-class; residuals (Sep, lower is better) or W f (NonSep)
};

//! argmin_c || x - W^c s_{lambda_c}(A^c x) ||^2, ties to the smallest index.
Prediction classify(const SepModel& model, Eigen::Ref<const Vector> x);

//! argmax_c (W s_lambda(A x))_c, ties to the smallest index.
Prediction classify(const NonSepModel& model, Eigen::Ref<const Vector> x);

struct EvalReport {
  double accuracy = 0.0;
  Vector per_class_accuracy;
  Eigen::MatrixXi confusion;  // rows true, columns predicted
  double mean_query_us = 0.0;
  std::vector<Prediction> predictions;
};

//! Shared evaluation loop: works for any model with classify(model, x) and
//! num_classes().  Timing covers the classify calls only.
template <class ModelT>
EvalReport evaluate_model(const ModelT& model, const Matrix& X,
                          const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != X.cols())
    throw std::invalid_argument("evaluate: label count does not match samples");
  const int C = model.num_classes();
  EvalReport report;
  report.confusion = Eigen::MatrixXi::Zero(C, C);
  report.predictions.reserve(labels.size());

  using Clock = std::chrono::steady_clock;
  std::chrono::nanoseconds spent{0};
  int correct = 0;
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    const int truth = labels[static_cast<std::size_t>(i)];
    if (truth < 0 || truth >= C)
      throw std::invalid_argument("evaluate: label out of range");
    const auto t0 = Clock::now();
    Prediction pred = classify(model, X.col(i));
    spent += Clock::now() - t0;
    report.confusion(truth, pred.label) += 1;
    if (pred.label == truth) ++correct;
    report.predictions.push_back(std::move(pred));
  }

  const Eigen::Index N = X.cols();
  report.accuracy = N > 0 ? static_cast<double>(correct) / N : 0.0;
  report.per_class_accuracy.resize(C);
  for (int c = 0; c < C; ++c) {
    const int total = report.confusion.row(c).sum();
    report.per_class_accuracy[c] =
        total > 0 ? static_cast<double>(report.confusion(c, c)) / total : 0.0;
  }
  report.mean_query_us =
      N > 0 ? std::chrono::duration<double, std::micro>(spent).count() / N : 0.0;
  return report;
}

EvalReport evaluate(const SepModel& model, const Matrix& X,
                    const std::vector<int>& labels);
EvalReport evaluate(const NonSepModel& model, const Matrix& X,
                    const std::vector<int>& labels);

//! index,predicted[,true] rows with a header.
void write_predictions_csv(std::ostream& out,
                           const std::vector<Prediction>& predictions,
                           const std::vector<int>* true_labels = nullptr);

//! true\pred confusion matrix as CSV with labeled header row/column.
void write_confusion_csv(std::ostream& out, const Eigen::MatrixXi& confusion);

//! Reference accuracies of the method on four standard benchmarks, printed
//! by the eval report as context.  Documentation only; nothing in this
//! build measures or asserts them.
std::string reference_accuracy_table();

}  // namespace dnaol
