#include "dnaol/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <ostream>
#include <thread>

namespace dnaol {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::mt19937_64 class_rng(std::uint64_t seed, int c) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

double fit_residual_sq(const Matrix& targets, const Matrix& W, const Matrix& F) {
  return (targets - W * F).squaredNorm();
}

// Largest eigenvalue of F F^T via power iteration with a fixed start vector.
double largest_eigenvalue(const Matrix& F, int iterations) {
  const Eigen::Index p = F.rows();
  if (p == 0 || F.size() == 0) return 0.0;
  Matrix B = F * F.transpose();
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = n01(rng);
  double norm = v.norm();
  if (norm == 0.0) return 0.0;
  v /= norm;
  for (int it = 0; it < iterations; ++it) {
    Vector w = B * v;
    norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
  }
  return v.dot(B * v);
}

struct FitOutcome {
  AnalysisModel model;
  Matrix W;
  std::vector<OuterRecord> rows;
  std::vector<ResidualRecord> residuals;
};

// One alternating run: feature-model splitting solve, then the W-step,
// until the relative loss change drops below epsilon.
FitOutcome fit_alternating(const Matrix& Xfit, const Matrix& targets,
                           const OperatorRegularizer& reg, Eigen::Index p,
                           const HyperParams& hp, std::mt19937_64 rng) {
  FitOutcome out;
  out.model = init_analysis_model(p, Xfit.rows(), hp.sigma2, rng);
  out.W = init_classifier(targets.rows(), p, rng);

  SolverOptions sopts;
  sopts.rho = hp.rho;
  sopts.max_iterations = hp.inner_iterations;
  sopts.residual_tol = hp.residual_tol;
  sopts.warm_start_sweeps = hp.warm_start;

  auto objective = [&](const Matrix& W, const Matrix& A, const Matrix& F) {
    return 0.5 * fit_residual_sq(targets, W, F) + reg.value(A);
  };

  Matrix F = extract_features(out.model, Xfit);
  double prev_loss = objective(out.W, out.model.A, F);
  out.rows.push_back({0, prev_loss, 0, 0.0, {}});

  for (int t = 1; t <= hp.max_outer; ++t) {
    const auto t0 = Clock::now();
    LossSpec loss{targets, out.W};
    NacmResult res = solve_nacm(loss, reg, Xfit, out.model, sopts);
    // The splitting solve is not guaranteed to descend the exact objective
    // at a finite iteration budget; keep the previous model when it does not.
    const double cand = objective(out.W, res.model.A, res.features);
    if (cand <= prev_loss) {
      out.model = std::move(res.model);
      F = std::move(res.features);
    }
    out.W = update_W(F, targets, out.W);
    const double L = objective(out.W, out.model.A, F);
    out.rows.push_back({t, L, static_cast<long>(res.history.size()),
                        seconds_since(t0), {}});
    for (ResidualRecord rec : res.history) {
      rec.iteration = static_cast<int>(out.residuals.size()) + 1;
      out.residuals.push_back(rec);
    }
    const double delta = std::abs(prev_loss - L);
    prev_loss = L;
    if (delta < hp.epsilon * std::max(std::abs(L), 1e-12)) break;
  }
  return out;
}

// Column indices of X sorted lexicographically by content, used to make the
// inter-class Gram independent of sample order.
Matrix sorted_columns(const Matrix& X, const std::vector<int>& cols) {
  std::vector<int> order = cols;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (X(i, a) < X(i, b)) return true;
      if (X(i, a) > X(i, b)) return false;
    }
    return false;
  });
  Matrix out(X.rows(), static_cast<Eigen::Index>(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) out.col(k) = X.col(order[k]);
  return out;
}

Matrix select_columns(const Matrix& X, const std::vector<int>& cols) {
  Matrix out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(k) = X.col(cols[k]);
  return out;
}

void validate_training_input(const Matrix& X, const std::vector<int>& labels,
                             const HyperParams& hp, int feature_budget) {
  if (!X.allFinite())
    throw std::invalid_argument("training data contains non-finite values");
  if (static_cast<Eigen::Index>(labels.size()) != X.cols())
    throw std::invalid_argument("label count does not match sample count");
  if (feature_budget < 1)
    throw std::invalid_argument("feature budget must be at least 1");
  if (hp.tau <= 0.0)
    throw std::invalid_argument("tau must be positive");
  if (hp.rho <= 0.0) throw std::invalid_argument("rho must be positive");
  if (hp.sigma2 < 0.0) throw std::invalid_argument("sigma2 must be >= 0");
  if (hp.max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
}

}  // namespace

AnalysisModel init_analysis_model(Eigen::Index p, Eigen::Index n, double sigma2,
                                  std::mt19937_64& rng) {
  if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be >= 0");
  std::normal_distribution<double> n01(0.0, 1.0);
  const double sd = std::sqrt(sigma2);
  AnalysisModel m;
  m.A.resize(p, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < p; ++j) m.A(j, k) = sd * n01(rng);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  m.selector = FeatureSelector(u01(rng));
  return m;
}

Matrix init_classifier(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix W(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k)
    for (Eigen::Index j = 0; j < rows; ++j) W(j, k) = n01(rng);
  project_columns(W);
  return W;
}

void project_columns(Matrix& W) {
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    const double norm = W.col(k).norm();
    if (norm > 1.0) W.col(k) /= norm;
  }
}

Matrix update_W(const Matrix& F, const Matrix& targets, const Matrix& W0,
                const WUpdateOptions& opts) {
  if (F.cols() != targets.cols())
    throw std::invalid_argument("update_W: feature/target column mismatch");
  if (W0.cols() != F.rows() || W0.rows() != targets.rows())
    throw std::invalid_argument("update_W: W0 shape mismatch");
  const double L = largest_eigenvalue(F, opts.power_iterations);
  if (!(L > 0.0)) return W0;
  const double step = 1.0 / L;

  Matrix W = W0;
  double obj = fit_residual_sq(targets, W, F);
  for (int it = 0; it < opts.max_steps; ++it) {
    Matrix trial = W - step * ((W * F - targets) * F.transpose());
    project_columns(trial);
    const double trial_obj = fit_residual_sq(targets, trial, F);
    if (trial_obj > obj) break;
    const double improvement = obj - trial_obj;
    W = std::move(trial);
    obj = trial_obj;
    if (improvement <= opts.rel_tol * std::max(obj, 1e-30)) break;
  }
  return W;
}

int count_classes(const std::vector<int>& labels) {
  if (labels.empty()) throw std::invalid_argument("labels are empty");
  int max_label = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("labels must be nonnegative");
    max_label = std::max(max_label, l);
  }
  return max_label + 1;
}

Matrix one_hot(const std::vector<int>& labels, int num_classes) {
  Matrix Y = Matrix::Zero(num_classes, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw std::invalid_argument("label out of range");
    Y(labels[i], static_cast<Eigen::Index>(i)) = 1.0;
  }
  return Y;
}

SepTrainResult train_sep(const Matrix& X, const std::vector<int>& labels,
                         const HyperParams& hp, int feature_budget,
                         int threads) {
  validate_training_input(X, labels, hp, feature_budget);
  const int C = count_classes(labels);
  std::vector<std::vector<int>> members(C);
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[labels[i]].push_back(static_cast<int>(i));
  for (int c = 0; c < C; ++c)
    if (members[c].empty())
      throw std::invalid_argument("class " + std::to_string(c) +
                                  " has no samples");
  const Eigen::Index p_c = std::max(1, feature_budget / C);

  std::vector<FitOutcome> outcomes(C);
  std::vector<std::exception_ptr> errors(C);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int c = next.fetch_add(1); c < C; c = next.fetch_add(1)) {
      try {
        Matrix Xc = select_columns(X, members[c]);
        std::vector<int> rest;
        rest.reserve(labels.size() - members[c].size());
        for (std::size_t i = 0; i < labels.size(); ++i)
          if (labels[static_cast<int>(i)] != c)
            rest.push_back(static_cast<int>(i));
        OperatorRegularizer reg{hp.tau, hp.alpha, sorted_columns(X, rest)};
        outcomes[c] = fit_alternating(Xc, Xc, reg, p_c, hp,
                                      class_rng(hp.seed, c));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const int workers = std::max(1, std::min(threads, C));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (int c = 0; c < C; ++c)
    if (errors[c]) std::rethrow_exception(errors[c]);

  SepTrainResult result;
  result.model.classes.resize(C);
  result.residuals.resize(C);
  std::size_t depth = 0;
  for (int c = 0; c < C; ++c) {
    result.model.classes[c] = {std::move(outcomes[c].model),
                               std::move(outcomes[c].W)};
    result.residuals[c] = std::move(outcomes[c].residuals);
    depth = std::max(depth, outcomes[c].rows.size());
  }

  result.log.num_classes = C;
  for (std::size_t t = 0; t < depth; ++t) {
    OuterRecord row;
    row.iteration = static_cast<int>(t);
    row.class_loss.resize(C);
    for (int c = 0; c < C; ++c) {
      const auto& rows = outcomes[c].rows;
      const std::size_t idx = std::min(t, rows.size() - 1);
      row.class_loss[c] = rows[idx].loss;
      row.loss += rows[idx].loss;
      if (t < rows.size()) {
        row.admm_iterations += rows[t].admm_iterations;
        row.wall_seconds += rows[t].wall_seconds;
      }
    }
    result.log.rows.push_back(std::move(row));
  }
  return result;
}

NonSepTrainResult train_nonsep(const Matrix& X, const std::vector<int>& labels,
                               const HyperParams& hp, int feature_budget) {
  validate_training_input(X, labels, hp, feature_budget);
  const int C = count_classes(labels);
  const Matrix Y = one_hot(labels, C);
  OperatorRegularizer reg{hp.tau, 0.0, Matrix()};
  std::mt19937_64 rng = class_rng(hp.seed, -1);
  FitOutcome out = fit_alternating(X, Y, reg, feature_budget, hp, rng);

  NonSepTrainResult result;
  result.model.model = std::move(out.model);
  result.model.W = std::move(out.W);
  result.log.num_classes = 0;
  result.log.rows = std::move(out.rows);
  result.residuals = std::move(out.residuals);
  return result;
}

void TrainLog::write_csv(std::ostream& out) const {
  out << "iteration,loss";
  for (int c = 0; c < num_classes; ++c) out << ",loss_class_" << c;
  out << ",admm_iterations,wall_seconds\n";
  out.precision(17);
  for (const OuterRecord& r : rows) {
    out << r.iteration << ',' << r.loss;
    for (double v : r.class_loss) out << ',' << v;
    out << ',' << r.admm_iterations << ',' << r.wall_seconds << '\n';
  }
}

}  // namespace dnaol
