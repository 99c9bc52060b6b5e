#include "dnaol/classify.hpp"

#include <ostream>

namespace dnaol {

namespace {

int argbest(const Vector& scores, bool maximize) {
  int best = 0;
  for (int c = 1; c < scores.size(); ++c) {
    const bool better = maximize ? scores[c] > scores[best]
                                 : scores[c] < scores[best];
    if (better) best = c;  // ties keep the smallest index
  }
  return best;
}

}  // namespace

Prediction classify(const SepModel& model, Eigen::Ref<const Vector> x) {
  const int C = model.num_classes();
  if (C == 0) throw std::invalid_argument("classify: empty model");
  Prediction pred;
  pred.scores.resize(C);
  for (int c = 0; c < C; ++c) {
    const ClassModel& cm = model.classes[c];
    const Vector f = extract_features_column(cm.model, x);
    pred.scores[c] = (x - cm.W * f).squaredNorm();
  }
  pred.label = argbest(pred.scores, /*maximize=*/false);
  return pred;
}

Prediction classify(const NonSepModel& model, Eigen::Ref<const Vector> x) {
  if (model.W.rows() == 0) throw std::invalid_argument("classify: empty model");
  Prediction pred;
  const Vector f = extract_features_column(model.model, x);
  pred.scores = model.W * f;
  pred.label = argbest(pred.scores, /*maximize=*/true);
  return pred;
}

EvalReport evaluate(const SepModel& model, const Matrix& X,
                    const std::vector<int>& labels) {
  return evaluate_model(model, X, labels);
}

EvalReport evaluate(const NonSepModel& model, const Matrix& X,
                    const std::vector<int>& labels) {
  return evaluate_model(model, X, labels);
}

void write_predictions_csv(std::ostream& out,
                           const std::vector<Prediction>& predictions,
                           const std::vector<int>* true_labels) {
  out << "index,predicted";
  if (true_labels) out << ",true";
  out << '\n';
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out << i << ',' << predictions[i].label;
    if (true_labels) out << ',' << (*true_labels)[i];
    out << '\n';
  }
}

std::string reference_accuracy_table() {
  return
      "reference accuracies (%), standard benchmark splits, for context only\n"
      "(published results for this method; not measured by this run):\n"
      "  corpus         sep    nonsep\n"
      "  E-YaleB        97.9   97.8\n"
      "  AR             98.5   98.6\n"
      "  Caltech-101    71.8   73.1\n"
      "  15-Scene       98.2   97.9\n";
}

void write_confusion_csv(std::ostream& out, const Eigen::MatrixXi& confusion) {
  out << "true\\pred";
  for (int c = 0; c < confusion.cols(); ++c) out << ',' << c;
  out << '\n';
  for (int r = 0; r < confusion.rows(); ++r) {
    out << r;
    for (int c = 0; c < confusion.cols(); ++c) out << ',' << confusion(r, c);
    out << '\n';
  }
}

}  // namespace dnaol
