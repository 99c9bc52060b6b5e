#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dnaol/baselines.hpp"
#include "dnaol/classify.hpp"
#include "dnaol/data_io.hpp"
#include "dnaol/run_config.hpp"

namespace fs = std::filesystem;
using namespace dnaol;

namespace {

struct HyperFlags {
  double alpha = 0, tau = 0, sigma2 = 0, rho = 0, epsilon = 0, residual_tol = 0;
  long max_outer = 0, warm_start = 0, inner = 0, budget = 0, threads = 0;
  unsigned long long seed = 0;
  std::string scheme, config;
  bool no_normalize = false;

  CLI::Option *o_alpha = nullptr, *o_tau = nullptr, *o_sigma2 = nullptr,
              *o_rho = nullptr, *o_epsilon = nullptr, *o_restol = nullptr,
              *o_max_outer = nullptr, *o_warm = nullptr, *o_inner = nullptr,
              *o_budget = nullptr, *o_threads = nullptr, *o_seed = nullptr,
              *o_scheme = nullptr, *o_no_normalize = nullptr;

  void attach(CLI::App* cmd) {
    o_scheme = cmd->add_option("--scheme", scheme, "sep or nonsep");
    o_alpha = cmd->add_option("--alpha", alpha, "inter-class suppression weight");
    o_tau = cmd->add_option("--tau", tau, "operator Frobenius regularization");
    o_sigma2 = cmd->add_option("--sigma2", sigma2, "operator init variance");
    o_rho = cmd->add_option("--rho", rho, "splitting penalty");
    o_epsilon = cmd->add_option("--epsilon", epsilon, "outer stop threshold");
    o_restol = cmd->add_option("--residual-tol", residual_tol,
                               "inner solver residual tolerance");
    o_max_outer = cmd->add_option("--max-outer", max_outer, "outer iteration cap");
    o_warm = cmd->add_option("--warm-start", warm_start, "warm-start sweeps");
    o_inner = cmd->add_option("--inner", inner, "inner iterations per outer step");
    o_budget = cmd->add_option("--budget", budget, "total feature budget");
    o_threads = cmd->add_option("--threads", threads, "worker threads (Sep)");
    o_seed = cmd->add_option("--seed", seed, "RNG seed");
    o_no_normalize =
        cmd->add_flag("--no-normalize", no_normalize,
                      "skip unit-norm normalization of input samples");
    cmd->add_option("--config", config, "key=value config file");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config.empty()) cfg.load_file(config);
    auto apply = [&cfg](CLI::Option* opt, const std::string& key, auto value) {
      if (opt && opt->count() > 0) {
        cfg.set_keys.insert(key);
        return true;
      }
      (void)value;
      return false;
    };
    if (apply(o_alpha, "alpha", alpha)) cfg.hp.alpha = alpha;
    if (apply(o_tau, "tau", tau)) cfg.hp.tau = tau;
    if (apply(o_sigma2, "sigma2", sigma2)) cfg.hp.sigma2 = sigma2;
    if (apply(o_rho, "rho", rho)) cfg.hp.rho = rho;
    if (apply(o_epsilon, "epsilon", epsilon)) cfg.hp.epsilon = epsilon;
    if (apply(o_restol, "residual_tol", residual_tol))
      cfg.hp.residual_tol = residual_tol;
    if (apply(o_max_outer, "max_outer", max_outer))
      cfg.hp.max_outer = static_cast<int>(max_outer);
    if (apply(o_warm, "warm_start", warm_start))
      cfg.hp.warm_start = static_cast<int>(warm_start);
    if (apply(o_inner, "inner_iterations", inner))
      cfg.hp.inner_iterations = static_cast<int>(inner);
    if (apply(o_seed, "seed", seed)) cfg.hp.seed = seed;
    if (apply(o_scheme, "scheme", scheme)) {
      if (scheme != "sep" && scheme != "nonsep")
        throw ConfigError("scheme must be 'sep' or 'nonsep', got '" + scheme +
                          "'");
      cfg.scheme = scheme;
    }
    if (apply(o_budget, "feature_budget", budget))
      cfg.feature_budget = static_cast<int>(budget);
    if (apply(o_threads, "threads", threads))
      cfg.threads = static_cast<int>(threads);
    if (o_no_normalize && o_no_normalize->count() > 0) {
      cfg.set_keys.insert("normalize");
      cfg.normalize = false;
    }
    return cfg;
  }
};

void print_config(const RunConfig& cfg) {
  std::cout << "config: scheme=" << cfg.scheme << " alpha=" << cfg.hp.alpha
            << " tau=" << cfg.hp.tau << " sigma2=" << cfg.hp.sigma2
            << " rho=" << cfg.hp.rho << " epsilon=" << cfg.hp.epsilon
            << " max_outer=" << cfg.hp.max_outer
            << " warm_start=" << cfg.hp.warm_start
            << " inner_iterations=" << cfg.hp.inner_iterations
            << " residual_tol=" << cfg.hp.residual_tol
            << " seed=" << cfg.hp.seed << " feature_budget=" << cfg.feature_budget
            << " normalize=" << (cfg.normalize ? "true" : "false")
            << " threads=" << cfg.resolve_threads() << "\n";
  const auto defaulted = cfg.defaulted_keys();
  if (!defaulted.empty()) {
    std::cout << "defaults in effect:";
    for (const auto& k : defaulted) std::cout << ' ' << k;
    std::cout << "\n";
  }
}

Matrix load_samples(const std::string& path, bool normalize) {
  Matrix X = load_matrix(path);
  if (!normalize) return X;
  NormalizeResult norm = normalize_unit_l2(X);
  if (norm.zero_columns > 0)
    std::cerr << "warning: " << norm.zero_columns
              << " zero-norm column(s) left unnormalized\n";
  return std::move(norm.X);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  long classes = 4, per_class = 100, dim = 20;
  double separation = 5.0, noise = 1.0;
  unsigned long long seed = 0;
  std::string out, format = "csv";
};

int run_gen(const GenArgs& args) {
  if (args.format != "csv" && args.format != "bin")
    throw ConfigError("--format must be csv or bin, got '" + args.format + "'");
  SyntheticDataset ds = gen_synthetic(
      static_cast<int>(args.classes), static_cast<int>(args.per_class),
      static_cast<int>(args.dim), args.separation, args.noise, args.seed);
  fs::create_directories(args.out);
  const fs::path dir(args.out);
  const std::string data_path =
      (dir / (args.format == "csv" ? "data.csv" : "data.bin")).string();
  if (args.format == "csv")
    save_matrix_csv(data_path, ds.X);
  else
    save_matrix_binary(data_path, ds.X);
  const std::string labels_path = (dir / "labels.txt").string();
  save_labels(labels_path, ds.labels);
  std::cout << "wrote " << ds.X.cols() << " samples of dimension " << ds.X.rows()
            << " in " << args.classes << " classes\n"
            << "  data:   " << data_path << "\n"
            << "  labels: " << labels_path << "\n";
  return 0;
}

// ---- train --------------------------------------------------------------

struct TrainArgs {
  HyperFlags hyper;
  std::string data, labels, out, log, residuals;
};

int run_train(const TrainArgs& args) {
  RunConfig cfg = args.hyper.resolve();
  print_config(cfg);
  const Matrix X = load_samples(args.data, cfg.normalize);
  const std::vector<int> y = load_labels(args.labels);

  const auto t0 = std::chrono::steady_clock::now();
  TrainLog log;
  TrainedModel model;
  std::string residual_csv;
  if (cfg.scheme == "sep") {
    SepTrainResult res = train_sep(X, y, cfg.hp, cfg.feature_budget,
                                   cfg.resolve_threads());
    log = std::move(res.log);
    // Residual export follows class 0; other classes run the same solver.
    std::ostringstream os;
    write_residual_csv(os, res.residuals.empty()
                               ? std::vector<ResidualRecord>{}
                               : res.residuals.front());
    residual_csv = os.str();
    model = std::move(res.model);
  } else {
    NonSepTrainResult res = train_nonsep(X, y, cfg.hp, cfg.feature_budget);
    log = std::move(res.log);
    std::ostringstream os;
    write_residual_csv(os, res.residuals);
    residual_csv = os.str();
    model = std::move(res.model);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  save_model(args.out, model, cfg.hp);
  if (!args.log.empty()) {
    std::ostringstream os;
    log.write_csv(os);
    write_text_file(args.log, os.str());
  }
  if (!args.residuals.empty()) write_text_file(args.residuals, residual_csv);

  const double final_loss = log.rows.empty() ? 0.0 : log.rows.back().loss;
  std::cout << "trained " << cfg.scheme << " model: outer iterations "
            << (log.rows.empty() ? 0 : log.rows.back().iteration)
            << ", final loss " << final_loss << ", wall time " << wall
            << " s\n"
            << "model written to " << args.out << "\n";
  return 0;
}

// ---- eval ---------------------------------------------------------------

struct EvalArgs {
  std::string model, data, labels, pred_out, confusion_out;
  std::string train_data, train_labels;
  bool crc = false, nearest_mean_flag = false, no_normalize = false;
  double crc_weight = 1e-3;
};

void print_report(const std::string& name, const EvalReport& report) {
  std::cout << name << ": overall accuracy " << 100.0 * report.accuracy
            << "% over " << report.predictions.size() << " queries, mean "
            << report.mean_query_us << " us/query\n  per-class:";
  for (Eigen::Index c = 0; c < report.per_class_accuracy.size(); ++c)
    std::cout << ' ' << 100.0 * report.per_class_accuracy[c] << '%';
  std::cout << "\n";
}

int run_eval(const EvalArgs& args) {
  if ((args.crc || args.nearest_mean_flag) &&
      (args.train_data.empty() || args.train_labels.empty()))
    throw ConfigError("--crc/--nearest-mean need --train-data and --train-labels");

  LoadedModel loaded = load_model(args.model);
  const Matrix X = load_samples(args.data, !args.no_normalize);
  const std::vector<int> y = load_labels(args.labels);

  EvalReport report;
  std::string scheme;
  if (std::holds_alternative<SepModel>(loaded.model)) {
    scheme = "sep";
    report = evaluate(std::get<SepModel>(loaded.model), X, y);
  } else {
    scheme = "nonsep";
    report = evaluate(std::get<NonSepModel>(loaded.model), X, y);
  }
  print_report(scheme, report);

  if (!args.pred_out.empty()) {
    std::ostringstream os;
    write_predictions_csv(os, report.predictions, &y);
    write_text_file(args.pred_out, os.str());
  }
  if (!args.confusion_out.empty()) {
    std::ostringstream os;
    write_confusion_csv(os, report.confusion);
    write_text_file(args.confusion_out, os.str());
  }

  if (args.crc || args.nearest_mean_flag) {
    const Matrix D = load_samples(args.train_data, !args.no_normalize);
    const std::vector<int> dy = load_labels(args.train_labels);
    if (args.crc) {
      CrcModel crc = make_crc(D, dy, args.crc_weight);
      print_report("crc", evaluate(crc, X, y));
    }
    if (args.nearest_mean_flag) {
      NearestMeanModel nm = make_nearest_mean(D, dy);
      print_report("nearest-mean", evaluate(nm, X, y));
    }
  }

  std::cout << "\n" << reference_accuracy_table();
  return 0;
}

// ---- bench --------------------------------------------------------------

struct BenchArgs {
  HyperFlags hyper;
  std::string data, labels, test_data, test_labels, out;
  std::string budgets = "40,80,160";
  long split = 0;
  unsigned long long split_seed = 0;
};

std::vector<int> parse_budgets(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      throw ConfigError("bad --budgets entry '" + item + "'");
    }
    if (out.back() < 1) throw ConfigError("budgets must be >= 1");
  }
  if (out.empty()) throw ConfigError("--budgets is empty");
  return out;
}

int run_bench(const BenchArgs& args) {
  RunConfig cfg = args.hyper.resolve();
  print_config(cfg);
  const std::vector<int> budgets = parse_budgets(args.budgets);

  Matrix train_X = load_samples(args.data, cfg.normalize);
  std::vector<int> train_y = load_labels(args.labels);
  Matrix test_X;
  std::vector<int> test_y;
  if (!args.test_data.empty() && !args.test_labels.empty()) {
    test_X = load_samples(args.test_data, cfg.normalize);
    test_y = load_labels(args.test_labels);
  } else if (args.split > 0) {
    SplitResult split = split_train_test(train_X, train_y,
                                         static_cast<int>(args.split),
                                         args.split_seed);
    train_X = std::move(split.train_X);
    train_y = std::move(split.train_labels);
    test_X = std::move(split.test_X);
    test_y = std::move(split.test_labels);
  } else {
    throw ConfigError("bench needs --test-data/--test-labels or --split");
  }

  std::ostringstream csv;
  csv << "budget,scheme,accuracy,train_seconds,mean_query_us\n";
  csv.precision(17);
  auto add_row = [&](int budget, const std::string& scheme, double acc,
                     double secs, double us) {
    csv << budget << ',' << scheme << ',' << acc << ',' << secs << ',' << us
        << '\n';
    std::cout << "  budget " << budget << " " << scheme << ": accuracy "
              << 100.0 * acc << "%, train " << secs << " s, " << us
              << " us/query\n";
  };

  using Clock = std::chrono::steady_clock;
  for (int budget : budgets) {
    {
      auto t0 = Clock::now();
      SepTrainResult res =
          train_sep(train_X, train_y, cfg.hp, budget, cfg.resolve_threads());
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      EvalReport rep = evaluate(res.model, test_X, test_y);
      add_row(budget, "sep", rep.accuracy, secs, rep.mean_query_us);
    }
    {
      auto t0 = Clock::now();
      NonSepTrainResult res = train_nonsep(train_X, train_y, cfg.hp, budget);
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      EvalReport rep = evaluate(res.model, test_X, test_y);
      add_row(budget, "nonsep", rep.accuracy, secs, rep.mean_query_us);
    }
  }
  {
    auto t0 = Clock::now();
    CrcModel crc = make_crc(train_X, train_y);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    EvalReport rep = evaluate(crc, test_X, test_y);
    add_row(0, "crc", rep.accuracy, secs, rep.mean_query_us);
  }
  {
    auto t0 = Clock::now();
    NearestMeanModel nm = make_nearest_mean(train_X, train_y);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    EvalReport rep = evaluate(nm, test_X, test_y);
    add_row(0, "nearest_mean", rep.accuracy, secs, rep.mean_query_us);
  }

  if (!args.out.empty()) write_text_file(args.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlinear analysis operator learning for classification"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset");
  gen_cmd->add_option("--classes", gen.classes, "number of classes");
  gen_cmd->add_option("--per-class", gen.per_class, "samples per class");
  gen_cmd->add_option("--dim", gen.dim, "sample dimension");
  gen_cmd->add_option("--sep", gen.separation, "class mean separation");
  gen_cmd->add_option("--noise", gen.noise, "noise standard deviation");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--format", gen.format, "csv or bin");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train.hyper.attach(train_cmd);
  train_cmd->add_option("--data", train.data, "training samples")->required();
  train_cmd->add_option("--labels", train.labels, "training labels")->required();
  train_cmd->add_option("--out", train.out, "model output path")->required();
  train_cmd->add_option("--log", train.log, "training log CSV");
  train_cmd->add_option("--residuals", train.residuals,
                        "inner-solver residual CSV");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a trained model");
  eval_cmd->add_option("--model", eval.model, "model file")->required();
  eval_cmd->add_option("--data", eval.data, "query samples")->required();
  eval_cmd->add_option("--labels", eval.labels, "true labels")->required();
  eval_cmd->add_option("--pred-out", eval.pred_out, "predictions CSV");
  eval_cmd->add_option("--confusion-out", eval.confusion_out, "confusion CSV");
  eval_cmd->add_flag("--crc", eval.crc, "also run the CRC baseline");
  eval_cmd->add_flag("--nearest-mean", eval.nearest_mean_flag,
                     "also run the nearest-mean baseline");
  eval_cmd->add_option("--crc-weight", eval.crc_weight, "CRC ridge weight");
  eval_cmd->add_option("--train-data", eval.train_data,
                       "training samples for the baselines");
  eval_cmd->add_option("--train-labels", eval.train_labels,
                       "training labels for the baselines");
  eval_cmd->add_flag("--no-normalize", eval.no_normalize,
                     "skip unit-norm normalization");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "budget sweep benchmark");
  bench.hyper.attach(bench_cmd);
  bench_cmd->add_option("--data", bench.data, "training samples")->required();
  bench_cmd->add_option("--labels", bench.labels, "training labels")->required();
  bench_cmd->add_option("--test-data", bench.test_data, "test samples");
  bench_cmd->add_option("--test-labels", bench.test_labels, "test labels");
  bench_cmd->add_option("--split", bench.split,
                        "train size per class when splitting --data");
  bench_cmd->add_option("--split-seed", bench.split_seed, "split RNG seed");
  bench_cmd->add_option("--budgets", bench.budgets,
                        "comma-separated feature budgets");
  bench_cmd->add_option("--out", bench.out, "results CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(gen_cmd)) return run_gen(gen);
    if (app.got_subcommand(train_cmd)) return run_train(train);
    if (app.got_subcommand(eval_cmd)) return run_eval(eval);
    if (app.got_subcommand(bench_cmd)) return run_bench(bench);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "error: solver diverged at iteration " << e.iteration() << ": "
              << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
