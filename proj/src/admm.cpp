#include "dnaol/admm.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <ostream>

namespace dnaol {

namespace {

void require_finite(const Matrix& M, const char* name) {
  if (!M.allFinite())
    throw std::invalid_argument(std::string(name) + " contains non-finite values");
}

double entry_objective(double z, double u1, double u2, double lambda) {
  const FeatureSelector sel(lambda);
  const double a = sel(z) - u2;
  const double b = z - u1;
  return a * a + b * b;
}

}  // namespace

Matrix update_F(const LossSpec& loss, const Matrix& S_of_Z, const Matrix& U2,
                double rho, int direct_solve_limit, double cg_tol) {
  if (rho <= 0.0) throw std::invalid_argument("update_F: rho must be positive");
  require_finite(loss.targets, "targets");
  require_finite(loss.weights, "weights");
  require_finite(S_of_Z, "S_of_Z");
  require_finite(U2, "U2");
  const Eigen::Index p = loss.weights.cols();
  if (S_of_Z.rows() != p || U2.rows() != p || S_of_Z.cols() != U2.cols())
    throw std::invalid_argument("update_F: shape mismatch");
  if (loss.targets.rows() != loss.weights.rows() ||
      loss.targets.cols() != S_of_Z.cols())
    throw std::invalid_argument("update_F: targets shape mismatch");

  Matrix M = loss.weights.transpose() * loss.weights;
  M.diagonal().array() += rho;
  Matrix rhs = loss.weights.transpose() * loss.targets + rho * S_of_Z + U2;

  if (p <= direct_solve_limit) {
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("update_F: Cholesky factorization failed");
    return llt.solve(rhs);
  }
  Eigen::ConjugateGradient<Matrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(cg_tol);
  cg.compute(M);
  Matrix F = cg.solve(rhs);
  if (cg.info() != Eigen::Success)
    throw std::runtime_error("update_F: conjugate gradient did not converge");
  return F;
}

double update_Z_entry(double u1, double u2, double lambda) {
  if (lambda < 0.0) lambda = 0.0;
  const double l2 = lambda * lambda;
  const double den = l2 + 1.0;

  // Candidate minimizer on each piece of s_lambda, clamped into its piece.
  const double z_mid = std::clamp(u1, -1.0, 1.0);
  const double z_pos = std::max(1.0, (l2 + lambda * u2 + u1) / den);
  const double z_neg = std::min(-1.0, (-l2 + lambda * u2 + u1) / den);

  double best = z_mid;
  double best_obj = entry_objective(z_mid, u1, u2, lambda);
  for (double z : {z_pos, z_neg}) {
    const double obj = entry_objective(z, u1, u2, lambda);
    const bool better =
        obj < best_obj ||
        (obj == best_obj && (std::abs(z) < std::abs(best) ||
                             (std::abs(z) == std::abs(best) && z < best)));
    if (better) {
      best = z;
      best_obj = obj;
    }
  }
  return best;
}

Matrix update_Z(const Matrix& U1_tilde, const Matrix& U2_tilde, double lambda) {
  if (U1_tilde.rows() != U2_tilde.rows() || U1_tilde.cols() != U2_tilde.cols())
    throw std::invalid_argument("update_Z: shape mismatch");
  Matrix Z(U1_tilde.rows(), U1_tilde.cols());
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
      Z(i, j) = update_Z_entry(U1_tilde(i, j), U2_tilde(i, j), lambda);
  return Z;
}

double update_lambda(const Matrix& Z, const Matrix& U2_tilde, double prev) {
  if (Z.rows() != U2_tilde.rows() || Z.cols() != U2_tilde.cols())
    throw std::invalid_argument("update_lambda: shape mismatch");
  double gu = 0.0, gg = 0.0;
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      const double g = soft_threshold(Z(i, j), 1.0);
      gu += g * U2_tilde(i, j);
      gg += g * g;
    }
  }
  if (gg == 0.0) return prev;  // selector output identically zero
  const double lam = gu / gg;
  return lam < 0.0 ? 0.0 : lam;
}

Matrix gram_matrix(const OperatorRegularizer& reg, const Matrix& X, double rho) {
  Matrix G = rho * (X * X.transpose());
  if (reg.Xbar.cols() > 0 && reg.alpha != 0.0) {
    if (reg.Xbar.rows() != X.rows())
      throw std::invalid_argument("gram_matrix: Xbar row mismatch");
    G.noalias() += reg.alpha * (reg.Xbar * reg.Xbar.transpose());
  }
  G.diagonal().array() += reg.tau;
  return G;
}

namespace {

Eigen::LLT<Matrix> factor_gram(const OperatorRegularizer& reg, const Matrix& X,
                               double rho) {
  Matrix G = gram_matrix(reg, X, rho);
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "A-step Gram matrix is singular; set tau > 0 to regularize");
  return llt;
}

}  // namespace

Matrix gram_inverse(const OperatorRegularizer& reg, const Matrix& X, double rho) {
  Eigen::LLT<Matrix> llt = factor_gram(reg, X, rho);
  return llt.solve(Matrix::Identity(X.rows(), X.rows()));
}

Matrix update_A(const OperatorRegularizer& reg, const Matrix& Z, const Matrix& U1,
                const Matrix& X, double rho, const Matrix* precomputed) {
  if (rho <= 0.0) throw std::invalid_argument("update_A: rho must be positive");
  if (Z.rows() != U1.rows() || Z.cols() != U1.cols())
    throw std::invalid_argument("update_A: Z/U1 shape mismatch");
  if (Z.cols() != X.cols())
    throw std::invalid_argument("update_A: Z/X column mismatch");
  Matrix rhs = (rho * Z + U1) * X.transpose();  // p x n
  Matrix A;
  if (precomputed) {
    if (precomputed->rows() != X.rows() || precomputed->cols() != X.rows())
      throw std::invalid_argument("update_A: precomputed inverse shape mismatch");
    A = rhs * (*precomputed);
  } else {
    Eigen::LLT<Matrix> llt = factor_gram(reg, X, rho);
    A = llt.solve(rhs.transpose()).transpose();
  }
  if (!A.allFinite())
    throw std::runtime_error(
        "A-step produced non-finite values; set tau > 0 to regularize");
  // A rank-deficient Gram can slip through Cholesky with tau = 0; reject
  // solutions that do not actually satisfy the normal equations.
  if (reg.tau == 0.0) {
    const Matrix G = gram_matrix(reg, X, rho);
    const double rel = (A * G - rhs).norm() / std::max(1.0, rhs.norm());
    if (!(rel < 1e-6))
      throw std::runtime_error(
          "A-step Gram matrix is singular; set tau > 0 to regularize");
  }
  return A;
}

namespace {

// Shared bookkeeping for dual_ascent and the warm-start sweeps.
void record_iterate(AdmmState& state, const Matrix& A, double lambda,
                    const Matrix& X, double objective, bool update_duals) {
  const Matrix AX = A * X;
  Matrix SZ = state.Z;
  FeatureSelector(lambda).apply(SZ);

  if (update_duals) {
    state.U1.noalias() += state.rho * (state.Z - AX);
    state.U2.noalias() += state.rho * (SZ - state.F);
  }

  ResidualRecord rec;
  rec.iteration = ++state.iteration;
  rec.primal1 = (state.Z - AX).norm();
  rec.primal2 = (SZ - state.F).norm();
  rec.dual1 = state.prev_AX.size() ? state.rho * (AX - state.prev_AX).norm() : 0.0;
  rec.dual2 = state.prev_F.size() ? state.rho * (state.F - state.prev_F).norm() : 0.0;
  rec.objective = objective;
  state.history.push_back(rec);

  state.prev_AX = AX;
  state.prev_F = state.F;
}

}  // namespace

void dual_ascent(AdmmState& state, const Matrix& A, double lambda,
                 const Matrix& X, double objective) {
  record_iterate(state, A, lambda, X, objective, true);
}

NacmResult solve_nacm(const LossSpec& loss, const OperatorRegularizer& reg,
                      const Matrix& X, const AnalysisModel& init,
                      const SolverOptions& opts) {
  require_finite(X, "X");
  require_finite(init.A, "init.A");
  if (init.A.cols() != X.rows())
    throw std::invalid_argument("solve_nacm: operator/input dimension mismatch");
  if (loss.targets.cols() != X.cols())
    throw std::invalid_argument("solve_nacm: targets/input column mismatch");
  if (loss.weights.cols() != init.A.rows())
    throw std::invalid_argument("solve_nacm: weights/operator dimension mismatch");
  if (opts.rho <= 0.0)
    throw std::invalid_argument("solve_nacm: rho must be positive");

  Matrix A = init.A;
  double lambda = init.selector.lambda;

  AdmmState state;
  state.rho = opts.rho;
  Matrix AX = A * X;
  state.Z = AX;
  state.F = AX;
  FeatureSelector(lambda).apply(state.F);
  state.U1 = Matrix::Zero(AX.rows(), AX.cols());
  state.U2 = Matrix::Zero(AX.rows(), AX.cols());
  state.prev_AX = AX;
  state.prev_F = state.F;

  const Matrix Ginv = gram_inverse(reg, X, opts.rho);

  NacmResult result;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const bool warm = it < opts.warm_start_sweeps;

    Matrix SZ = state.Z;
    FeatureSelector(lambda).apply(SZ);
    state.F = update_F(loss, SZ, state.U2, opts.rho, opts.direct_solve_limit,
                       opts.cg_tol);

    const Matrix U1t = AX - state.U1 / opts.rho;
    const Matrix U2t = state.F - state.U2 / opts.rho;
    state.Z = update_Z(U1t, U2t, lambda);
    lambda = update_lambda(state.Z, U2t, lambda);
    A = update_A(reg, state.Z, state.U1, X, opts.rho, &Ginv);
    AX.noalias() = A * X;

    if (!A.allFinite() || !state.Z.allFinite() || !state.F.allFinite() ||
        !std::isfinite(lambda))
      throw DivergenceError(it + 1, "solve_nacm: iterate diverged at iteration " +
                                        std::to_string(it + 1));

    const double objective = loss.value(state.F) + reg.value(A);
    record_iterate(state, A, lambda, X, objective, !warm);
    if (!std::isfinite(objective))
      throw DivergenceError(it + 1,
                            "solve_nacm: objective diverged at iteration " +
                                std::to_string(it + 1));

    if (!warm) {
      const ResidualRecord& rec = state.history.back();
      const double scale = std::max(AX.norm(), 1e-12);
      if (rec.primal1 <= opts.residual_tol * scale &&
          rec.primal2 <= opts.residual_tol * scale) {
        result.converged = true;
        break;
      }
    }
  }

  result.model.A = std::move(A);
  result.model.selector = FeatureSelector(lambda);
  result.features = extract_features(result.model, X);
  result.history = std::move(state.history);
  return result;
}

void write_residual_csv(std::ostream& out,
                        const std::vector<ResidualRecord>& history) {
  out << "iteration,primal1,primal2,dual1,dual2,objective\n";
  out.precision(17);
  for (const ResidualRecord& r : history)
    out << r.iteration << ',' << r.primal1 << ',' << r.primal2 << ',' << r.dual1
        << ',' << r.dual2 << ',' << r.objective << '\n';
}

}  // namespace dnaol
