#include "doctest.h"

#include <random>
#include <sstream>

#include "dnaol/data_io.hpp"
#include "dnaol/train.hpp"

using namespace dnaol;

namespace {

// Small well-separated three-class problem, unit-normalized.
struct Fixture {
  Matrix X;
  std::vector<int> labels;
};

Fixture fixture(std::uint64_t seed = 3) {
  SyntheticDataset ds = gen_synthetic(3, 20, 8, 5.0, 1.0, seed);
  return {normalize_unit_l2(ds.X).X, ds.labels};
}

HyperParams fast_hp() {
  HyperParams hp;
  hp.sigma2 = 5.0;
  hp.tau = 1e-4;
  hp.alpha = 0.1;
  hp.rho = 10.0;
  hp.max_outer = 6;
  hp.inner_iterations = 10;
  hp.seed = 11;
  return hp;
}

bool same_model(const SepModel& a, const SepModel& b) {
  if (a.classes.size() != b.classes.size()) return false;
  for (std::size_t c = 0; c < a.classes.size(); ++c) {
    if (a.classes[c].model.selector.lambda != b.classes[c].model.selector.lambda)
      return false;
    if (a.classes[c].model.A != b.classes[c].model.A) return false;
    if (a.classes[c].W != b.classes[c].W) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("operator initialization is seeded and scaled") {
  std::mt19937_64 r1(42), r2(42);
  AnalysisModel m1 = init_analysis_model(6, 4, 2.0, r1);
  AnalysisModel m2 = init_analysis_model(6, 4, 2.0, r2);
  CHECK(m1.A == m2.A);
  CHECK(m1.selector.lambda == m2.selector.lambda);
  CHECK(m1.selector.lambda > 0.0);
  CHECK(m1.selector.lambda < 1.0);

  std::mt19937_64 r3(42);
  AnalysisModel degenerate = init_analysis_model(6, 4, 0.0, r3);
  CHECK(degenerate.A == Matrix::Zero(6, 4));
}

TEST_CASE("classifier initialization lands inside the unit balls") {
  std::mt19937_64 rng(7);
  Matrix W = init_classifier(5, 40, rng);
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    CHECK(W.col(j).norm() <= 1.0 + 1e-12);
  // with 5 standard-normal entries most raw columns exceed the ball, so the
  // projection must actually have fired
  int on_boundary = 0;
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    if (W.col(j).norm() > 1.0 - 1e-9) ++on_boundary;
  CHECK(on_boundary > 0);
}

TEST_CASE("column projection only touches offending columns") {
  Matrix W(2, 2);
  W.col(0) << 0.25, 0.5;  // norm < 1: untouched, bitwise
  W.col(1) << 3.0, 4.0;   // norm 5: rescaled
  Matrix before = W;
  project_columns(W);
  CHECK(W.col(0) == before.col(0));
  CHECK(W.col(1).norm() == doctest::Approx(1.0));
  CHECK(W(0, 1) == doctest::Approx(0.6));
  CHECK(W(1, 1) == doctest::Approx(0.8));
}

TEST_CASE("W-step drives zero targets to a zero classifier") {
  std::mt19937_64 rng(5);
  Matrix F = init_classifier(4, 20, rng);  // well-conditioned features
  Matrix W0 = init_classifier(3, 4, rng);
  WUpdateOptions opts;
  opts.max_steps = 5000;
  opts.rel_tol = 0.0;
  Matrix W = update_W(F, Matrix::Zero(3, 20), W0, opts);
  CHECK(W.norm() <= 1e-6);
}

TEST_CASE("scalar W-step saturates at the ball boundary") {
  Matrix F(1, 1), T(1, 1), W0(1, 1);
  F << 2.0;
  T << 5.0;  // unconstrained optimum 2.5 lies outside the ball
  W0 << 0.3;
  Matrix W = update_W(F, T, W0);
  CHECK(W(0, 0) == 1.0);
  T << -5.0;
  W = update_W(F, T, W0);
  CHECK(W(0, 0) == -1.0);
}

TEST_CASE("W-step matches the interior least-squares solution") {
  // construct targets whose unconstrained optimum sits strictly inside the
  // unit balls; the projected method must then find the plain normal-equation
  // solution
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix F(4, 30);
  for (Eigen::Index j = 0; j < F.cols(); ++j)
    for (Eigen::Index i = 0; i < F.rows(); ++i) F(i, j) = n01(rng);
  Matrix Wstar(3, 4);
  for (Eigen::Index j = 0; j < 4; ++j)
    for (Eigen::Index i = 0; i < 3; ++i) Wstar(i, j) = 0.1 * n01(rng);
  Matrix T = Wstar * F;
  Matrix W0 = Matrix::Zero(3, 4);
  WUpdateOptions opts;
  opts.max_steps = 20000;
  opts.rel_tol = 0.0;
  Matrix W = update_W(F, T, W0, opts);
  CHECK((W - Wstar).norm() <= 1e-6 * Wstar.norm());
}

TEST_CASE("W-step never increases the objective") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix F(6, 25), T(4, 25);
  for (Eigen::Index j = 0; j < 25; ++j) {
    for (Eigen::Index i = 0; i < 6; ++i) F(i, j) = n01(rng);
    for (Eigen::Index i = 0; i < 4; ++i) T(i, j) = n01(rng);
  }
  Matrix W0 = init_classifier(4, 6, rng);
  const double before = 0.5 * (T - W0 * F).squaredNorm();
  Matrix W = update_W(F, T, W0);
  const double after = 0.5 * (T - W * F).squaredNorm();
  CHECK(after <= before + 1e-12);
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    CHECK(W.col(j).norm() <= 1.0 + 1e-12);
}

TEST_CASE("one-hot encoding and class counting") {
  std::vector<int> labels = {0, 2, 1, 2};
  CHECK(count_classes(labels) == 3);
  Matrix Y = one_hot(labels, 3);
  Matrix expected(3, 4);
  expected << 1, 0, 0, 0,
              0, 0, 1, 0,
              0, 1, 0, 1;
  CHECK(Y == expected);
  CHECK_THROWS_AS(count_classes({}), std::invalid_argument);
  CHECK_THROWS_AS(count_classes({0, -1}), std::invalid_argument);
}

TEST_CASE("class-specific training keeps every W column feasible") {
  Fixture fx = fixture();
  SepTrainResult res = train_sep(fx.X, fx.labels, fast_hp(), 12);
  REQUIRE(res.model.num_classes() == 3);
  for (const ClassModel& cm : res.model.classes)
    for (Eigen::Index j = 0; j < cm.W.cols(); ++j)
      CHECK(cm.W.col(j).norm() <= 1.0 + 1e-12);
}

TEST_CASE("outer loss is non-increasing for both schemes") {
  Fixture fx = fixture();
  SepTrainResult sep = train_sep(fx.X, fx.labels, fast_hp(), 12);
  REQUIRE(sep.log.rows.size() >= 2);
  for (std::size_t k = 1; k < sep.log.rows.size(); ++k)
    CHECK(sep.log.rows[k].loss <= sep.log.rows[k - 1].loss + 1e-9);

  NonSepTrainResult ns = train_nonsep(fx.X, fx.labels, fast_hp(), 12);
  REQUIRE(ns.log.rows.size() >= 2);
  for (std::size_t k = 1; k < ns.log.rows.size(); ++k)
    CHECK(ns.log.rows[k].loss <= ns.log.rows[k - 1].loss + 1e-9);
}

TEST_CASE("training is deterministic under a fixed seed") {
  Fixture fx = fixture();
  SepTrainResult a = train_sep(fx.X, fx.labels, fast_hp(), 12);
  SepTrainResult b = train_sep(fx.X, fx.labels, fast_hp(), 12);
  CHECK(same_model(a.model, b.model));

  NonSepTrainResult na = train_nonsep(fx.X, fx.labels, fast_hp(), 12);
  NonSepTrainResult nb = train_nonsep(fx.X, fx.labels, fast_hp(), 12);
  CHECK(na.model.model.A == nb.model.model.A);
  CHECK(na.model.model.selector.lambda == nb.model.model.selector.lambda);
  CHECK(na.model.W == nb.model.W);
}

TEST_CASE("the thread count does not change the trained model") {
  Fixture fx = fixture();
  SepTrainResult serial = train_sep(fx.X, fx.labels, fast_hp(), 12, 1);
  SepTrainResult parallel = train_sep(fx.X, fx.labels, fast_hp(), 12, 4);
  CHECK(same_model(serial.model, parallel.model));
}

TEST_CASE("a class is immune to sample order inside other classes") {
  Fixture fx = fixture();
  SepTrainResult base = train_sep(fx.X, fx.labels, fast_hp(), 12);

  // swap two class-1 columns; class 0 sees them only through its inter-class
  // term, which treats them as a set
  Matrix Xp = fx.X;
  std::vector<int> lp = fx.labels;
  int first = -1, second = -1;
  for (std::size_t i = 0; i < lp.size(); ++i)
    if (lp[i] == 1) {
      if (first < 0)
        first = static_cast<int>(i);
      else if (second < 0)
        second = static_cast<int>(i);
    }
  REQUIRE(second > 0);
  Xp.col(first).swap(Xp.col(second));
  SepTrainResult swapped = train_sep(Xp, lp, fast_hp(), 12);
  CHECK(base.model.classes[0].model.A == swapped.model.classes[0].model.A);
  CHECK(base.model.classes[0].model.selector.lambda ==
        swapped.model.classes[0].model.selector.lambda);
  CHECK(base.model.classes[0].W == swapped.model.classes[0].W);
}

TEST_CASE("alpha = 0 decouples a class from the rest of the data") {
  Fixture fx = fixture();
  HyperParams hp = fast_hp();
  hp.alpha = 0.0;
  // class 0 trained inside the 3-class problem (budget 36 -> p_c = 12) ...
  SepTrainResult full = train_sep(fx.X, fx.labels, hp, 36);

  // ... must equal a stand-alone run on the class-0 columns alone
  std::vector<int> keep;
  for (std::size_t i = 0; i < fx.labels.size(); ++i)
    if (fx.labels[i] == 0) keep.push_back(static_cast<int>(i));
  Matrix X0(fx.X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    X0.col(static_cast<Eigen::Index>(k)) = fx.X.col(keep[k]);
  std::vector<int> l0(keep.size(), 0);
  SepTrainResult alone = train_sep(X0, l0, hp, 12);

  CHECK(full.model.classes[0].model.A == alone.model.classes[0].model.A);
  CHECK(full.model.classes[0].model.selector.lambda ==
        alone.model.classes[0].model.selector.lambda);
  CHECK(full.model.classes[0].W == alone.model.classes[0].W);
}

TEST_CASE("sigma2 = 0 trains a zero operator without failing") {
  Fixture fx = fixture();
  HyperParams hp = fast_hp();
  hp.sigma2 = 0.0;
  SepTrainResult res = train_sep(fx.X, fx.labels, hp, 12);
  for (const ClassModel& cm : res.model.classes)
    CHECK(cm.model.A == Matrix::Zero(cm.model.A.rows(), cm.model.A.cols()));
}

TEST_CASE("single-class training is degenerate but legal") {
  Fixture fx = fixture();
  std::vector<int> ones(fx.labels.size(), 0);
  NonSepTrainResult res = train_nonsep(fx.X, ones, fast_hp(), 12);
  CHECK(res.model.num_classes() == 1);
  CHECK(res.model.W.rows() == 1);
  SepTrainResult sep = train_sep(fx.X, ones, fast_hp(), 12);
  CHECK(sep.model.num_classes() == 1);
}

TEST_CASE("an absent class is reported by name") {
  Fixture fx = fixture();
  std::vector<int> gappy = fx.labels;
  for (int& l : gappy)
    if (l == 1) l = 2;  // class 1 disappears
  CHECK_THROWS_WITH_AS(train_sep(fx.X, gappy, fast_hp(), 12),
                       doctest::Contains("class 1"), std::invalid_argument);
}

TEST_CASE("training log CSV carries the per-class breakdown") {
  Fixture fx = fixture();
  SepTrainResult res = train_sep(fx.X, fx.labels, fast_hp(), 12);
  std::ostringstream os;
  res.log.write_csv(os);
  const std::string text = os.str();
  CHECK(text.find("iteration,loss,loss_class_0,loss_class_1,loss_class_2,"
                  "admm_iterations,wall_seconds\n") == 0);
  // one line per outer record plus the header
  std::size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == res.log.rows.size() + 1);

  NonSepTrainResult ns = train_nonsep(fx.X, fx.labels, fast_hp(), 12);
  std::ostringstream ns_os;
  ns.log.write_csv(ns_os);
  CHECK(ns_os.str().find("iteration,loss,admm_iterations,wall_seconds\n") == 0);
}

TEST_CASE("splitting residuals are renumbered across outer steps") {
  Fixture fx = fixture();
  SepTrainResult res = train_sep(fx.X, fx.labels, fast_hp(), 12);
  REQUIRE(res.residuals.size() == 3);
  for (const auto& hist : res.residuals) {
    REQUIRE(!hist.empty());
    for (std::size_t k = 0; k < hist.size(); ++k)
      CHECK(hist[k].iteration == static_cast<int>(k) + 1);
  }
}
