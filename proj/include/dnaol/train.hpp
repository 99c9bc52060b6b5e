#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "dnaol/admm.hpp"

namespace dnaol {

struct HyperParams {
  double alpha = 1e-4;   // weight of the inter-class suppression term (Sep)
  double tau = 7e-6;     // Frobenius regularization of the operator
  double sigma2 = 5.0;   // variance of the operator initialization
  double rho = 1.0;      // splitting penalty
  double epsilon = 1e-4; // relative loss change that stops the outer loop
  int max_outer = 20;
  int warm_start = 5;        // primal-only sweeps per feature-model solve
  int inner_iterations = 30; // splitting iterations per outer step
  double residual_tol = 1e-4;
  std::uint64_t seed = 0;
};

//! One class of the class-specific scheme: x ~ W s_lambda(A x).
struct ClassModel {
  AnalysisModel model;  // p_c x n operator plus selector
  Matrix W;             // n x p_c reconstruction weights
};

struct SepModel {
  std::vector<ClassModel> classes;
  int num_classes() const { return static_cast<int>(classes.size()); }
};

//! Shared-operator scheme: one feature model, linear scoring W f.
struct NonSepModel {
  AnalysisModel model;  // p x n
  Matrix W;             // C x p
  int num_classes() const { return static_cast<int>(W.rows()); }
};

struct OuterRecord {
  int iteration = 0;  // 0 is the post-initialization state
  double loss = 0.0;
  long admm_iterations = 0;
  double wall_seconds = 0.0;
  std::vector<double> class_loss;  // Sep only
};

struct TrainLog {
  int num_classes = 0;  // 0 when there is no per-class breakdown
  std::vector<OuterRecord> rows;
  void write_csv(std::ostream& out) const;
};

struct SepTrainResult {
  SepModel model;
  TrainLog log;
  // Per class: splitting-solver residuals concatenated across outer steps,
  // renumbered sequentially.
  std::vector<std::vector<ResidualRecord>> residuals;
};

struct NonSepTrainResult {
  NonSepModel model;
  TrainLog log;
  std::vector<ResidualRecord> residuals;
};

//! Operator with N(0, sigma2) entries and a selector scale drawn U(0, 1).
AnalysisModel init_analysis_model(Eigen::Index p, Eigen::Index n, double sigma2,
                                  std::mt19937_64& rng);

//! Standard-normal entries, then columns projected onto the unit ball.
Matrix init_classifier(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng);

//! Rescale any column with Euclidean norm > 1 back to norm 1.
void project_columns(Matrix& W);

struct WUpdateOptions {
  int max_steps = 500;
  double rel_tol = 1e-8;
  int power_iterations = 50;
};

//! Projected-gradient descent on ||targets - W F||_F^2 over the product of
//! unit balls, step 1/L with L the largest eigenvalue of F F^T estimated by
//! power iteration.  Steps that would increase the objective are rejected.
Matrix update_W(const Matrix& F, const Matrix& targets, const Matrix& W0,
                const WUpdateOptions& opts = {});

//! Class-specific training: per class c, alternate the feature-model solve
//! (targets X^c, inter-class term on the other classes' samples) with the
//! W-step.  feature_budget is split evenly across classes.  threads > 1
//! trains classes concurrently; results are identical to the serial run.
SepTrainResult train_sep(const Matrix& X, const std::vector<int>& labels,
                         const HyperParams& hp, int feature_budget,
                         int threads = 1);

//! Shared-operator training on one-hot targets; alpha is ignored.
NonSepTrainResult train_nonsep(const Matrix& X, const std::vector<int>& labels,
                               const HyperParams& hp, int feature_budget);

//! C x N one-hot encoding of labels in [0, C).
Matrix one_hot(const std::vector<int>& labels, int num_classes);

//! Largest class index + 1; throws on negative labels or empty input.
int count_classes(const std::vector<int>& labels);

}  // namespace dnaol
