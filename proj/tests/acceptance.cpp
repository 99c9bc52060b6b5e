// Acceptance gate: one check per release criterion, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dnaol/admm.hpp"
#include "dnaol/baselines.hpp"
#include "dnaol/classify.hpp"
#include "dnaol/data_io.hpp"
#include "dnaol/nacm.hpp"
#include "dnaol/train.hpp"

using namespace dnaol;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Criterion {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Criterion> results;

void record(int id, const std::string& name, bool pass,
            const std::string& detail) {
  results.push_back({id, name, pass, detail});
  std::cout << "criterion " << (id < 10 ? " " : "") << id << ": " << name
            << " ... " << (pass ? "PASS" : "FAIL") << " (" << detail << ")\n"
            << std::flush;
}

// --- 1: Z-step entry update vs exhaustive grid search --------------------

void check_z_update() {
  const auto t0 = Clock::now();
  const int kGrid = 20001;
  Eigen::ArrayXd zgrid(kGrid), shrink(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double z = -10.0 + 1e-3 * i;
    zgrid[i] = z;
    shrink[i] = z > 1.0 ? z - 1.0 : (z < -1.0 ? z + 1.0 : 0.0);
  }
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> noise(0.0, 2.0);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  Eigen::ArrayXd phi(kGrid);
  double worst_gap = -1e300;
  int failures = 0;
  const int kTrials = 100000;
  for (int t = 0; t < kTrials; ++t) {
    const double u1 = noise(rng), u2 = noise(rng), lambda = lam(rng);
    const double z = update_Z_entry(u1, u2, lambda);
    const double sz = lambda * (z > 1.0 ? z - 1.0 : (z < -1.0 ? z + 1.0 : 0.0));
    const double value = (z - u1) * (z - u1) + (sz - u2) * (sz - u2);
    phi = (zgrid - u1).square() + (lambda * shrink - u2).square();
    const double grid_best = phi.minCoeff();
    const double gap = value - grid_best;
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-9) ++failures;
  }
  const double secs = seconds_since(t0);
  record(1, "Z-step closed form matches grid search", failures == 0 && secs < 30.0,
         std::to_string(kTrials) + " triples, worst objective gap " +
             fmt(worst_gap) + ", " + fmt(secs) + " s");
}

// --- 2: selector-scale update vs grid search -----------------------------

void check_lambda_update() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4096);
  std::normal_distribution<double> wide(0.0, 2.0), unit(0.0, 1.0);
  double worst_gap = -1e300;
  int failures = 0;
  const int kTrials = 1000;
  for (int t = 0; t < kTrials; ++t) {
    Matrix Z(5, 5), U2t(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        Z(i, j) = wide(rng);
        U2t(i, j) = unit(rng);
      }
    const double prev = 0.3;
    const double lambda = update_lambda(Z, U2t, prev);
    Matrix G = Z.unaryExpr([](double z) {
      return z > 1.0 ? z - 1.0 : (z < -1.0 ? z + 1.0 : 0.0);
    });
    auto value = [&](double l) { return (l * G - U2t).squaredNorm(); };
    double grid_best = value(0.0);
    for (int i = 1; i <= 5000; ++i)
      grid_best = std::min(grid_best, value(1e-3 * i));
    const double gap = value(lambda) - grid_best;
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-9) ++failures;
  }
  const double secs = seconds_since(t0);
  record(2, "selector-scale update matches grid search",
         failures == 0 && secs < 10.0,
         std::to_string(kTrials) + " pairs, worst objective gap " +
             fmt(worst_gap) + ", " + fmt(secs) + " s");
}

// --- 3: unit-scale selector is the l1 proximity operator -----------------

void check_prox_identity() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> wide(0.0, 3.0);
  Vector v(10000);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = wide(rng);
  const double gap = prox_gap(v, 1.0);
  record(3, "unit-scale selector equals the l1 prox", gap <= 1e-12,
         "max abs diff " + fmt(gap) + " over 10000 entries");
}

// --- 4: linear sub-solves are stationary ---------------------------------

void check_linear_solves() {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto rand_matrix = [&](Eigen::Index r, Eigen::Index c) {
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) M(i, j) = unit(rng);
    return M;
  };
  std::uniform_int_distribution<int> dim(5, 30);
  std::uniform_real_distribution<double> rho_draw(0.5, 10.0);
  double worst_F = 0, worst_A = 0, worst_inv = 0;
  for (int t = 0; t < 100; ++t) {
    const int p = dim(rng), n = dim(rng), r = dim(rng), N = n + dim(rng);
    const double rho = rho_draw(rng);

    LossSpec loss;
    loss.weights = rand_matrix(r, p);
    loss.targets = rand_matrix(r, N);
    const Matrix S = rand_matrix(p, N);
    const Matrix U2 = rand_matrix(p, N);
    const Matrix F = update_F(loss, S, U2, rho);
    const Matrix lhs =
        (loss.weights.transpose() * loss.weights + rho * Matrix::Identity(p, p)) *
        F;
    const Matrix rhs = loss.weights.transpose() * loss.targets + rho * S + U2;
    worst_F = std::max(worst_F, (lhs - rhs).norm() / rhs.norm());

    OperatorRegularizer reg;
    reg.tau = 1e-6;
    reg.alpha = 0.05;
    reg.Xbar = rand_matrix(n, 10);
    const Matrix X = rand_matrix(n, N);
    const Matrix Z = rand_matrix(p, N);
    const Matrix U1 = rand_matrix(p, N);
    const Matrix A = update_A(reg, Z, U1, X, rho);
    const Matrix gram = gram_matrix(reg, X, rho);
    const Matrix arhs = (rho * Z + U1) * X.transpose();
    worst_A = std::max(worst_A, (A * gram - arhs).norm() / arhs.norm());

    const Matrix inv = gram_inverse(reg, X, rho);
    const Matrix A2 = update_A(reg, Z, U1, X, rho, &inv);
    worst_inv = std::max(worst_inv, (A - A2).norm() / std::max(1.0, A.norm()));
  }
  const bool pass = worst_F <= 1e-8 && worst_A <= 1e-8 && worst_inv <= 1e-10;
  record(4, "F- and A-step solutions are stationary", pass,
         "100 instances: F residual " + fmt(worst_F) + ", A residual " +
             fmt(worst_A) + ", precomputed-inverse gap " + fmt(worst_inv));
}

// --- 5: splitting solver drives the residuals down -----------------------

struct InnerRun {
  double primal1, primal2;
  bool duals_bounded;
};

InnerRun run_inner(const LossSpec& loss, const OperatorRegularizer& reg,
                   const Matrix& X, const AnalysisModel& init) {
  SolverOptions opts;
  opts.rho = 10.0;
  opts.max_iterations = 200;
  opts.residual_tol = 0.0;  // run the full budget
  NacmResult res = solve_nacm(loss, reg, X, init, opts);
  const ResidualRecord& last = res.history.back();
  double ref1 = 0, ref2 = 0;
  bool bounded = true;
  for (const ResidualRecord& rec : res.history) {
    if (!std::isfinite(rec.dual1) || !std::isfinite(rec.dual2)) bounded = false;
    if (rec.iteration == 10) {
      ref1 = rec.dual1;
      ref2 = rec.dual2;
    }
    if (rec.iteration > 10 &&
        (rec.dual1 > 10.0 * ref1 || rec.dual2 > 10.0 * ref2))
      bounded = false;
  }
  return {last.primal1, last.primal2, bounded};
}

void check_inner_convergence() {
  SyntheticDataset ds = gen_synthetic(4, 50, 20, 5.0, 1.0, 8);
  const Matrix Xn = normalize_unit_l2(ds.X).X;
  std::mt19937_64 rng(7);
  const AnalysisModel init = init_analysis_model(40, 20, 5.0, rng);

  // class-specific style: reconstruction targets plus suppression columns
  LossSpec sep_loss;
  sep_loss.weights = init_classifier(20, 40, rng);
  sep_loss.targets = Xn.leftCols(140);
  OperatorRegularizer sep_reg;
  sep_reg.tau = 7e-6;
  sep_reg.alpha = 0.01;
  sep_reg.Xbar = Xn.rightCols(60);
  const InnerRun sep = run_inner(sep_loss, sep_reg, Xn.leftCols(140), init);

  // shared style: one-hot targets over the full sample set
  LossSpec non_loss;
  non_loss.weights = init_classifier(4, 40, rng);
  non_loss.targets = one_hot(ds.labels, 4);
  OperatorRegularizer non_reg;
  non_reg.tau = 7e-6;
  const InnerRun non = run_inner(non_loss, non_reg, Xn, init);

  const bool pass = sep.primal1 < 1e-3 && sep.primal2 < 1e-3 &&
                    non.primal1 < 1e-3 && non.primal2 < 1e-3 &&
                    sep.duals_bounded && non.duals_bounded;
  record(5, "splitting residuals vanish on the n=20/p=40/N=200 fixture", pass,
         "200 iterations: primals " + fmt(sep.primal1) + "/" + fmt(sep.primal2) +
             " and " + fmt(non.primal1) + "/" + fmt(non.primal2) +
             ", duals within 10x of their iteration-10 level");
}

// --- shared training fixture for criteria 6-9 ----------------------------

struct TrainedFixture {
  HyperParams hp;
  SplitResult split;
  SepTrainResult sep;
  NonSepTrainResult nonsep;
  double train_seconds = 0;
  double sep_accuracy = 0, nonsep_accuracy = 0, oracle_accuracy = 0;
  double eval_seconds = 0;

  TrainedFixture() {
    hp.sigma2 = 5.0;
    hp.tau = 7e-6;
    hp.alpha = 0.1;
    hp.rho = 10.0;
    hp.inner_iterations = 10;
    hp.warm_start = 5;
    hp.max_outer = 20;
    hp.epsilon = 1e-4;
    hp.residual_tol = 1e-4;
    hp.seed = 1;

    SyntheticDataset ds = gen_synthetic(4, 100, 20, 5.0, 1.0, 8);
    const Matrix Xn = normalize_unit_l2(ds.X).X;
    split = split_train_test(Xn, ds.labels, 50, 123);

    auto t0 = Clock::now();
    sep = train_sep(split.train_X, split.train_labels, hp, 40);
    nonsep = train_nonsep(split.train_X, split.train_labels, hp, 40);
    train_seconds = seconds_since(t0);

    t0 = Clock::now();
    sep_accuracy = evaluate(sep.model, split.test_X, split.test_labels).accuracy;
    nonsep_accuracy =
        evaluate(nonsep.model, split.test_X, split.test_labels).accuracy;
    eval_seconds = seconds_since(t0);

    NearestMeanModel oracle =
        make_nearest_mean(split.train_X, split.train_labels);
    oracle_accuracy =
        evaluate(oracle, split.test_X, split.test_labels).accuracy;
  }

  static TrainedFixture& get() {
    static TrainedFixture fixture;
    return fixture;
  }
};

// --- 6: outer loop never increases the loss ------------------------------

bool monotone(const TrainLog& log) {
  for (std::size_t i = 1; i < log.rows.size(); ++i)
    if (log.rows[i].loss >
        log.rows[i - 1].loss + 1e-9 * std::max(1.0, log.rows.front().loss))
      return false;
  return true;
}

void check_outer_monotonicity() {
  TrainedFixture& fx = TrainedFixture::get();
  const bool pass = monotone(fx.sep.log) && monotone(fx.nonsep.log);
  record(6, "outer-loop loss is non-increasing", pass,
         std::to_string(fx.sep.log.rows.size() - 1) + " and " +
             std::to_string(fx.nonsep.log.rows.size() - 1) +
             " outer iterations, 1e-9 slack");
}

// --- 7: end-to-end classification on four Gaussian clusters --------------

void check_classification() {
  TrainedFixture& fx = TrainedFixture::get();
  const double wall = fx.train_seconds + fx.eval_seconds;
  const bool pass =
      fx.sep_accuracy >= 0.95 && fx.nonsep_accuracy >= 0.95 && wall < 60.0;
  record(7, "both schemes reach 95% test accuracy on 4 clusters", pass,
         "sep " + fmt(100 * fx.sep_accuracy) + "%, nonsep " +
             fmt(100 * fx.nonsep_accuracy) + "%, nearest-mean oracle " +
             fmt(100 * fx.oracle_accuracy) + "%, wall " + fmt(wall) + " s");
}

// --- 8: classifier columns stay inside the unit ball ---------------------

void check_classifier_constraint() {
  TrainedFixture& fx = TrainedFixture::get();
  double worst = 0;
  for (const ClassModel& cm : fx.sep.model.classes)
    for (Eigen::Index j = 0; j < cm.W.cols(); ++j)
      worst = std::max(worst, cm.W.col(j).norm());
  for (Eigen::Index j = 0; j < fx.nonsep.model.W.cols(); ++j)
    worst = std::max(worst, fx.nonsep.model.W.col(j).norm());
  record(8, "trained classifier columns have norm <= 1", worst <= 1.0 + 1e-12,
         "largest column norm " + fmt(worst));
}

// --- 9: training is bitwise reproducible ---------------------------------

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

void check_determinism() {
  TrainedFixture& fx = TrainedFixture::get();
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("dnaol_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  SepTrainResult sep2 =
      train_sep(fx.split.train_X, fx.split.train_labels, fx.hp, 40);
  NonSepTrainResult non2 =
      train_nonsep(fx.split.train_X, fx.split.train_labels, fx.hp, 40);

  save_model((dir / "sep_a.bin").string(), fx.sep.model, fx.hp);
  save_model((dir / "sep_b.bin").string(), sep2.model, fx.hp);
  save_model((dir / "non_a.bin").string(), fx.nonsep.model, fx.hp);
  save_model((dir / "non_b.bin").string(), non2.model, fx.hp);

  const bool sep_same =
      file_bytes((dir / "sep_a.bin").string()) ==
      file_bytes((dir / "sep_b.bin").string());
  const bool non_same =
      file_bytes((dir / "non_a.bin").string()) ==
      file_bytes((dir / "non_b.bin").string());
  std::error_code ec;
  fs::remove_all(dir, ec);
  record(9, "identical seed and config give identical model files",
         sep_same && non_same,
         std::string("sep ") + (sep_same ? "identical" : "DIFFER") +
             ", nonsep " + (non_same ? "identical" : "DIFFER"));
}

// --- 10: classification stays under a millisecond ------------------------

void check_query_speed() {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto rand_matrix = [&](Eigen::Index r, Eigen::Index c, double scale) {
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) M(i, j) = scale * unit(rng);
    return M;
  };
  const int n = 500, queries = 200;

  SepModel sep;
  sep.classes.resize(4);
  for (ClassModel& cm : sep.classes) {
    cm.model.A = rand_matrix(250, n, 0.1);  // 4 x 250 = 1000 feature dims
    cm.model.selector = FeatureSelector(0.5);
    cm.W = rand_matrix(n, 250, 0.05);
  }
  NonSepModel nonsep;
  nonsep.model.A = rand_matrix(1000, n, 0.1);
  nonsep.model.selector = FeatureSelector(0.5);
  nonsep.W = rand_matrix(4, 1000, 0.05);

  Matrix Q = rand_matrix(n, queries, 1.0);
  for (Eigen::Index j = 0; j < Q.cols(); ++j) Q.col(j).normalize();
  const std::vector<int> dummy(queries, 0);

  const double sep_us = evaluate(sep, Q, dummy).mean_query_us;
  const double non_us = evaluate(nonsep, Q, dummy).mean_query_us;
  record(10, "mean query time under 1 ms at 1000 feature dims",
         sep_us < 1000.0 && non_us < 1000.0,
         "sep " + fmt(sep_us) + " us, nonsep " + fmt(non_us) + " us over " +
             std::to_string(queries) + " queries at n=500");
}

// --- 11: published benchmark figures are context, not claims -------------

void check_reference_table() {
  const std::string table = reference_accuracy_table();
  const std::vector<std::string> values = {"97.9", "97.8", "98.5", "98.6",
                                           "71.8", "73.1", "98.2"};
  bool pass = table.find("not measured") != std::string::npos;
  for (const std::string& v : values)
    if (table.find(v) == std::string::npos) pass = false;
  record(11, "published accuracies ship as documentation only", pass,
         "eval report carries the reference table and marks it not measured");
}

}  // namespace

int main() {
  std::cout << "acceptance checks\n=================\n";
  check_z_update();
  check_lambda_update();
  check_prox_identity();
  check_linear_solves();
  check_inner_convergence();
  check_outer_monotonicity();
  check_classification();
  check_classifier_constraint();
  check_determinism();
  check_query_speed();
  check_reference_table();

  int failures = 0;
  for (const Criterion& c : results)
    if (!c.pass) ++failures;
  std::cout << "=================\n"
            << (results.size() - failures) << "/" << results.size()
            << " criteria passed\n";
  return failures;
}
