#pragma once

#include <iosfwd>
#include <vector>

#include "dnaol/nacm.hpp"

namespace dnaol {

//! Quadratic data term l(F) = 1/2 ||targets - weights * F||_F^2.
//!
//! Covers both training flavors: targets are the samples themselves
//! (per-class dictionaries) or one-hot label columns (shared model).
struct LossSpec {
  Matrix targets;  // r x N
  Matrix weights;  // r x p, held fixed while the feature model is solved

  double value(const Matrix& F) const {
    return 0.5 * (targets - weights * F).squaredNorm();
  }
};

//! Operator regularizer psi(A) = tau/2 ||A||_F^2 + alpha/2 ||A Xbar||_F^2.
//! Xbar may be empty (no inter-class term), in which case alpha is ignored.
struct OperatorRegularizer {
  double tau = 0.0;
  double alpha = 0.0;
  Matrix Xbar;  // n x M, columns the operator should be near-orthogonal to

  double value(const Matrix& A) const {
    double v = 0.5 * tau * A.squaredNorm();
    if (Xbar.cols() > 0 && alpha != 0.0)
      v += 0.5 * alpha * (A * Xbar).squaredNorm();
    return v;
  }
};

struct ResidualRecord {
  int iteration = 0;   // 1-based, warm-start sweeps included
  double primal1 = 0;  // ||Z - A X||_F
  double primal2 = 0;  // ||s_lambda(Z) - F||_F
  double dual1 = 0;    // rho * ||change in A X||_F
  double dual2 = 0;    // rho * ||change in F||_F
  double objective = 0;
};

struct SolverOptions {
  double rho = 1.0;
  int max_iterations = 300;
  double residual_tol = 1e-4;  // relative to ||A X||_F
  int warm_start_sweeps = 5;   // primal-only sweeps with duals frozen at zero
  int direct_solve_limit = 2000;  // feature dims above this use CG for F
  double cg_tol = 1e-10;
};

//! Splitting state for s_Lambda(A X) = F with auxiliary Z = A X.
struct AdmmState {
  Matrix F, Z, U1, U2;
  double rho = 1.0;
  int iteration = 0;
  Matrix prev_AX, prev_F;  // previous iterates for the dual residuals
  std::vector<ResidualRecord> history;
};

struct NacmResult {
  AnalysisModel model;
  Matrix features;  // s_lambda(A X), recomputed from the final model
  std::vector<ResidualRecord> history;
  bool converged = false;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

//! F-step: argmin 1/2||T - W F||^2 + rho/2 ||F - (S + U2/rho)||^2, i.e. the
//! solution of (W^T W + rho I) F = W^T T + rho S + U2.  Dense Cholesky up to
//! direct_solve_limit rows, conjugate gradient beyond.
Matrix update_F(const LossSpec& loss, const Matrix& S_of_Z, const Matrix& U2,
                double rho, int direct_solve_limit = 2000, double cg_tol = 1e-10);

//! Z-step for one entry: argmin_z (s_lambda(z) - u2)^2 + (z - u1)^2.
//! Closed form over the three pieces of the selector; ties prefer the
//! smallest |z|, then the smaller z.
double update_Z_entry(double u1, double u2, double lambda);

//! Entrywise Z-step over U1_tilde = A X - U1/rho, U2_tilde = F - U2/rho.
Matrix update_Z(const Matrix& U1_tilde, const Matrix& U2_tilde, double lambda);

//! lambda-step: least-squares fit of lambda * G to U2_tilde where
//! G = sgn(Z) .* max(|Z| - 1, 0), clamped at zero.  G == 0 keeps prev.
double update_lambda(const Matrix& Z, const Matrix& U2_tilde, double prev);

//! Gram matrix tau I + rho X X^T + alpha Xbar Xbar^T of the A-step.
Matrix gram_matrix(const OperatorRegularizer& reg, const Matrix& X, double rho);

//! Inverse of the A-step Gram matrix; the Gram does not change across
//! iterations, so callers can compute this once.
Matrix gram_inverse(const OperatorRegularizer& reg, const Matrix& X, double rho);

//! A-step: solve A (tau I + rho X X^T + alpha Xbar Xbar^T) = (rho Z + U1) X^T.
//! Pass precomputed = &inv to reuse a gram_inverse.
Matrix update_A(const OperatorRegularizer& reg, const Matrix& Z, const Matrix& U1,
                const Matrix& X, double rho, const Matrix* precomputed = nullptr);

//! Gradient-ascent step on the duals plus bookkeeping: appends a residual
//! record, advances the iteration counter and stores the new comparison
//! iterates.  objective is recorded as given.
void dual_ascent(AdmmState& state, const Matrix& A, double lambda,
                 const Matrix& X, double objective);

//! Full splitting solve for min l(F) + psi(A) s.t. s_lambda(A X) = F.
//! Starts from init (operator and selector), runs warm-start sweeps with the
//! duals frozen, then ordinary iterations until both primal residuals fall
//! below residual_tol * ||A X||_F or the iteration cap is hit.
//! Throws DivergenceError if any iterate becomes non-finite.
NacmResult solve_nacm(const LossSpec& loss, const OperatorRegularizer& reg,
                      const Matrix& X, const AnalysisModel& init,
                      const SolverOptions& opts);

//! iteration,primal1,primal2,dual1,dual2,objective rows with a header.
void write_residual_csv(std::ostream& out,
                        const std::vector<ResidualRecord>& history);

}  // namespace dnaol
