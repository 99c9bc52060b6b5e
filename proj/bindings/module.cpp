#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dnaol/baselines.hpp"
#include "dnaol/classify.hpp"
#include "dnaol/data_io.hpp"

namespace py = pybind11;
using namespace dnaol;

namespace {

py::dict report_to_dict(const EvalReport& report) {
  py::dict d;
  d["accuracy"] = report.accuracy;
  d["per_class_accuracy"] = report.per_class_accuracy;
  d["confusion"] = report.confusion;
  d["mean_query_us"] = report.mean_query_us;
  std::vector<int> labels;
  labels.reserve(report.predictions.size());
  for (const Prediction& p : report.predictions) labels.push_back(p.label);
  d["predicted"] = labels;
  return d;
}

HyperParams hp_from_kwargs(double alpha, double tau, double sigma2, double rho,
                           double epsilon, int max_outer, int warm_start,
                           int inner_iterations, double residual_tol,
                           std::uint64_t seed) {
  HyperParams hp;
  hp.alpha = alpha;
  hp.tau = tau;
  hp.sigma2 = sigma2;
  hp.rho = rho;
  hp.epsilon = epsilon;
  hp.max_outer = max_outer;
  hp.warm_start = warm_start;
  hp.inner_iterations = inner_iterations;
  hp.residual_tol = residual_tol;
  hp.seed = seed;
  return hp;
}

}  // namespace

PYBIND11_MODULE(_dnaol, m) {
  m.doc() = "nonlinear analysis operator learning";

  py::class_<AnalysisModel>(m, "AnalysisModel")
      .def_property_readonly("A",
                             [](const AnalysisModel& am) { return am.A; })
      .def_property_readonly(
          "lam", [](const AnalysisModel& am) { return am.selector.lambda; });

  py::class_<SepModel>(m, "SepModel")
      .def_property_readonly("num_classes", &SepModel::num_classes)
      .def("class_operator",
           [](const SepModel& model, int c) { return model.classes.at(c).model.A; })
      .def("class_lambda",
           [](const SepModel& model, int c) {
             return model.classes.at(c).model.selector.lambda;
           })
      .def("class_weights",
           [](const SepModel& model, int c) { return model.classes.at(c).W; });

  py::class_<NonSepModel>(m, "NonSepModel")
      .def_property_readonly("num_classes", &NonSepModel::num_classes)
      .def_property_readonly("A",
                             [](const NonSepModel& model) { return model.model.A; })
      .def_property_readonly("lam",
                             [](const NonSepModel& model) {
                               return model.model.selector.lambda;
                             })
      .def_property_readonly("W",
                             [](const NonSepModel& model) { return model.W; });

  m.def(
      "extract_features",
      [](const Matrix& A, double lam, const Matrix& X) {
        AnalysisModel model;
        model.A = A;
        model.selector = FeatureSelector(lam);
        return extract_features(model, X);
      },
      py::arg("A"), py::arg("lam"), py::arg("X"),
      "Features s_lam(A X) for samples as columns of X.");

  m.def(
      "cosparsity",
      [](const Vector& f, double tol) { return cosparsity(f, tol); },
      py::arg("f"), py::arg("tol") = kCosparsityTol);

  m.def("update_z_entry", &update_Z_entry, py::arg("u1"), py::arg("u2"),
        py::arg("lam"));

  m.def(
      "train_sep",
      [](const Matrix& X, const std::vector<int>& labels, int feature_budget,
         double alpha, double tau, double sigma2, double rho, double epsilon,
         int max_outer, int warm_start, int inner_iterations,
         double residual_tol, std::uint64_t seed, int threads) {
        const HyperParams hp =
            hp_from_kwargs(alpha, tau, sigma2, rho, epsilon, max_outer,
                           warm_start, inner_iterations, residual_tol, seed);
        return train_sep(X, labels, hp, feature_budget, threads).model;
      },
      py::arg("X"), py::arg("labels"), py::arg("feature_budget") = 40,
      py::arg("alpha") = 1e-4, py::arg("tau") = 7e-6, py::arg("sigma2") = 5.0,
      py::arg("rho") = 1.0, py::arg("epsilon") = 1e-4, py::arg("max_outer") = 20,
      py::arg("warm_start") = 5, py::arg("inner_iterations") = 30,
      py::arg("residual_tol") = 1e-4, py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "train_nonsep",
      [](const Matrix& X, const std::vector<int>& labels, int feature_budget,
         double alpha, double tau, double sigma2, double rho, double epsilon,
         int max_outer, int warm_start, int inner_iterations,
         double residual_tol, std::uint64_t seed) {
        const HyperParams hp =
            hp_from_kwargs(alpha, tau, sigma2, rho, epsilon, max_outer,
                           warm_start, inner_iterations, residual_tol, seed);
        return train_nonsep(X, labels, hp, feature_budget).model;
      },
      py::arg("X"), py::arg("labels"), py::arg("feature_budget") = 40,
      py::arg("alpha") = 1e-4, py::arg("tau") = 7e-6, py::arg("sigma2") = 5.0,
      py::arg("rho") = 1.0, py::arg("epsilon") = 1e-4, py::arg("max_outer") = 20,
      py::arg("warm_start") = 5, py::arg("inner_iterations") = 30,
      py::arg("residual_tol") = 1e-4, py::arg("seed") = 0);

  m.def(
      "classify",
      [](const SepModel& model, const Vector& x) {
        return classify(model, x).label;
      },
      py::arg("model"), py::arg("x"));
  m.def(
      "classify",
      [](const NonSepModel& model, const Vector& x) {
        return classify(model, x).label;
      },
      py::arg("model"), py::arg("x"));

  m.def(
      "evaluate",
      [](const SepModel& model, const Matrix& X, const std::vector<int>& y) {
        return report_to_dict(evaluate(model, X, y));
      },
      py::arg("model"), py::arg("X"), py::arg("labels"));
  m.def(
      "evaluate",
      [](const NonSepModel& model, const Matrix& X, const std::vector<int>& y) {
        return report_to_dict(evaluate(model, X, y));
      },
      py::arg("model"), py::arg("X"), py::arg("labels"));

  m.def(
      "gen_synthetic",
      [](int classes, int per_class, int dim, double separation, double noise,
         std::uint64_t seed) {
        SyntheticDataset ds =
            gen_synthetic(classes, per_class, dim, separation, noise, seed);
        return py::make_tuple(ds.X, ds.labels, ds.means);
      },
      py::arg("classes"), py::arg("per_class"), py::arg("dim"),
      py::arg("separation") = 5.0, py::arg("noise") = 1.0, py::arg("seed") = 0);

  m.def("normalize_unit_l2", [](const Matrix& X) {
    NormalizeResult r = normalize_unit_l2(X);
    return py::make_tuple(r.X, r.zero_columns);
  });

  m.def(
      "save_model",
      [](const std::string& path, const SepModel& model) {
        save_model(path, model, HyperParams{});
      },
      py::arg("path"), py::arg("model"));
  m.def(
      "save_model",
      [](const std::string& path, const NonSepModel& model) {
        save_model(path, model, HyperParams{});
      },
      py::arg("path"), py::arg("model"));

  m.def("load_model", [](const std::string& path) -> py::object {
    LoadedModel loaded = load_model(path);
    if (std::holds_alternative<SepModel>(loaded.model))
      return py::cast(std::get<SepModel>(loaded.model));
    return py::cast(std::get<NonSepModel>(loaded.model));
  });

  m.def("load_matrix", &load_matrix, py::arg("path"));
  m.def("save_matrix_csv", &save_matrix_csv, py::arg("path"), py::arg("X"));
  m.def("save_matrix_binary", &save_matrix_binary, py::arg("path"), py::arg("X"));
  m.def("load_labels", &load_labels, py::arg("path"));
  m.def("save_labels", &save_labels, py::arg("path"), py::arg("labels"));
}
