// Command-line front end: simulate / estimate / benchmark / cv.
// Every command is a pure function of (flags, input files, seed) and
// drops a manifest next to its outputs.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pcdag/dagcov.hpp"
#include "pcdag/dataset.hpp"
#include "pcdag/eval.hpp"
#include "pcdag/glasso.hpp"
#include "pcdag/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct ManifestWriter {
  std::string command;
  std::vector<std::string> argv;
  ordered_json parameters = ordered_json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path& out_dir) const {
    ordered_json j;
    j["command"] = command;
    j["argv"] = argv;
    j["parameters"] = parameters;
    j["seed"] = seed;
    j["version"] = kVersion;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream f(out_dir / "manifest.json", std::ios::binary);
    f << j.dump(2) << '\n';
  }
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PCDAG_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw pcdag::ContractViolation("PCDAG_SEED is not a valid unsigned integer");
    }
  }
  return 0;
}

std::vector<double> matrix_flat(const pcdag::Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

pcdag::Matrix matrix_unflat(const std::vector<double>& v, int p) {
  if (static_cast<int>(v.size()) != p * p) {
    throw pcdag::InputError("matrix payload has wrong length");
  }
  pcdag::Matrix m(p, p);
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) m(r, c) = v[static_cast<std::size_t>(r) * p + c];
  }
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw pcdag::InputError("cannot open '" + path.string() + "' for writing");
  f << text;
}

pcdag::GroundTruth read_truth(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw pcdag::InputError("cannot open truth file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw pcdag::InputError(std::string("truth JSON parse failure: ") + e.what());
  }
  pcdag::GroundTruth truth;
  const int p = j.at("p").get<int>();
  if (j.contains("sigma") && !j["sigma"].is_null()) {
    truth.sigma = matrix_unflat(j["sigma"].get<std::vector<double>>(), p);
  }
  if (j.contains("omega") && !j["omega"].is_null()) {
    truth.omega = matrix_unflat(j["omega"].get<std::vector<double>>(), p);
  }
  return truth;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string model;
  int p = 0;
  int n = 0;
  double s = -1.0;
  double pi = -1.0;
  std::string error = "gaussian";
  bool random_sign = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
};

pcdag::ErrorKind parse_error_kind(const std::string& name) {
  if (name == "gaussian") return pcdag::ErrorKind::gaussian;
  if (name == "t3") return pcdag::ErrorKind::t3_contaminated;
  if (name == "cauchy") return pcdag::ErrorKind::cauchy_contaminated;
  throw pcdag::ContractViolation("unknown error distribution '" + name + "'");
}

int run_simulate(const SimulateArgs& args, const std::vector<std::string>& argv) {
  ManifestWriter manifest;
  manifest.command = "simulate";
  manifest.argv = argv;
  manifest.seed = args.seed_given ? args.seed : default_seed();

  const pcdag::ErrorDistribution err{parse_error_kind(args.error)};
  if (args.model == "dag" && args.s < 0.0) {
    throw pcdag::ContractViolation("--model dag requires --s");
  }
  if (args.model == "nondag" && args.pi < 0.0) {
    throw pcdag::ContractViolation("--model nondag requires --pi");
  }
  if (args.model == "nondag" && err.kind != pcdag::ErrorKind::gaussian) {
    throw pcdag::ContractViolation("contaminated errors are only defined for DAG models");
  }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  pcdag::Rng rng(manifest.seed);
  ordered_json truth;
  pcdag::Dataset data;
  if (args.model == "dag") {
    pcdag::Rng model_rng = rng.stream(0);
    const pcdag::DagModel model = pcdag::sample_dag_model(args.p, args.s, model_rng,
                                                          args.random_sign);
    pcdag::Rng data_rng = rng.stream(1);
    data = pcdag::sample_data(model, args.n, err, data_rng);
    truth["model"] = "dag";
    truth["p"] = args.p;
    truth["n"] = args.n;
    truth["s"] = args.s;
    truth["error"] = args.error;
    truth["seed"] = manifest.seed;
    truth["sigma"] = matrix_flat(model.sigma_true);
    truth["omega"] = matrix_flat(model.omega_true);
    truth["dag"] = ordered_json::parse(pcdag::graph_to_json(model.dag.graph()));
  } else if (args.model == "nondag") {
    pcdag::Rng model_rng = rng.stream(0);
    const pcdag::NonDagModel model = pcdag::sample_nondag_model(args.p, args.pi, model_rng);
    pcdag::Rng data_rng = rng.stream(1);
    data = pcdag::sample_data(model, args.n, err, data_rng);
    truth["model"] = "nondag";
    truth["p"] = args.p;
    truth["n"] = args.n;
    truth["pi"] = args.pi;
    truth["delta"] = model.delta;
    truth["degenerate"] = model.degenerate;
    truth["seed"] = manifest.seed;
    truth["sigma"] = matrix_flat(model.sigma_true);
    truth["omega"] = matrix_flat(model.omega_true);
  } else {
    throw pcdag::ContractViolation("unknown model '" + args.model + "'");
  }

  pcdag::write_csv((out_dir / "data.csv").string(), data.x);
  write_text(out_dir / "truth.json", truth.dump(2) + "\n");

  manifest.parameters = {{"model", args.model}, {"p", args.p},         {"n", args.n},
                         {"s", args.s},         {"pi", args.pi},       {"error", args.error},
                         {"random_sign", args.random_sign}};
  manifest.outputs = {"data.csv", "truth.json"};
  manifest.write(out_dir);
  return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string method;
  double alpha = -1.0;
  double lambda = -1.0;
  std::string input;
  std::string truth_path;
  int n_dags = 10;
  int max_order = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
};

int run_estimate(const EstimateArgs& args, const std::vector<std::string>& argv) {
  ManifestWriter manifest;
  manifest.command = "estimate";
  manifest.argv = argv;
  manifest.seed = args.seed_given ? args.seed : default_seed();

  const bool is_pcdag = args.method == "pcdag" || args.method == "pcdag-robust";
  const bool is_glasso = args.method == "glasso" || args.method == "glasso-robust";
  if (!is_pcdag && !is_glasso) {
    throw pcdag::ContractViolation("unknown method '" + args.method + "'");
  }
  if (is_pcdag && args.alpha < 0.0) {
    throw pcdag::ContractViolation("method '" + args.method + "' requires --alpha");
  }
  if (is_glasso && args.lambda < 0.0) {
    throw pcdag::ContractViolation("method '" + args.method + "' requires --lambda");
  }

  const pcdag::Dataset data = pcdag::read_csv(args.input);
  manifest.inputs.push_back(args.input);

  pcdag::EstimationResult result;
  if (is_pcdag) {
    pcdag::PcDagOptions opts;
    opts.alpha = args.alpha;
    opts.n_dags = args.n_dags;
    opts.initial = args.method == "pcdag" ? pcdag::InitialEstimator::mle
                                          : pcdag::InitialEstimator::ogk;
    opts.seed = manifest.seed;
    if (args.max_order >= 0) opts.max_order = args.max_order;
    result = pcdag::pc_dag_estimate(data, opts);
  } else {
    const pcdag::Matrix s = args.method == "glasso" ? pcdag::sample_covariance(data)
                                                    : pcdag::ogk_covariance(data).cov;
    pcdag::GlassoConfig cfg;
    cfg.lambda = args.lambda;
    const pcdag::GlassoResult fit = pcdag::glasso_fit(s, cfg);
    result.sigma = fit.sigma;
    result.omega = fit.omega;
    result.tuning = args.lambda;
    result.diagnostics["sweeps"] = fit.sweeps;
    result.diagnostics["converged"] = fit.converged ? 1.0 : 0.0;
    result.diagnostics["omega_nonzeros"] = pcdag::nonzero_count(fit.omega);
  }

  ordered_json j = ordered_json::parse(pcdag::estimation_result_to_json(result));
  j["method"] = args.method;
  if (!args.truth_path.empty()) {
    const pcdag::GroundTruth truth = read_truth(args.truth_path);
    manifest.inputs.push_back(args.truth_path);
    ordered_json losses;
    if (truth.sigma.has_value() && truth.omega.has_value()) {
      losses["kl"] = pcdag::kl_loss(*truth.sigma, result.omega);
      losses["frob_sigma"] = pcdag::frobenius_diff(result.sigma, *truth.sigma);
      losses["frob_omega"] = pcdag::frobenius_diff(result.omega, *truth.omega);
    }
    j["losses"] = losses;
  }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  write_text(out_dir / "result.json", j.dump(2) + "\n");

  manifest.parameters = {{"method", args.method}, {"alpha", args.alpha},
                         {"lambda", args.lambda}, {"n_dags", args.n_dags},
                         {"max_order", args.max_order}};
  manifest.outputs = {"result.json"};
  manifest.write(out_dir);
  return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  std::string setting;
  std::string model;
  int n = 0;
  double s = -1.0;
  double pi = -1.0;
  std::string error = "gaussian";
  std::vector<int> p_grid;
  int reps = 0;
  std::vector<std::string> methods;
  std::vector<double> alpha_grid;
  int lambda_points = 0;
  double lambda_decades = 0.0;
  int n_dags = 0;
  int jobs = 1;
  bool dump_replicates = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
};

int run_benchmark_cmd(const BenchmarkArgs& args, const std::vector<std::string>& argv) {
  ManifestWriter manifest;
  manifest.command = "benchmark";
  manifest.argv = argv;
  manifest.seed = args.seed_given ? args.seed : default_seed();

  pcdag::BenchmarkSetting setting;
  if (!args.setting.empty()) {
    setting = pcdag::named_setting(args.setting);
  } else {
    if (args.model.empty() || args.n == 0) {
      throw pcdag::ContractViolation("custom benchmarks need --model and --n");
    }
    setting.name = "custom";
    if (args.model == "dag") {
      setting.model = pcdag::ModelKind::dag;
      if (args.s < 0.0) throw pcdag::ContractViolation("--model dag requires --s");
      setting.s = args.s;
    } else if (args.model == "nondag") {
      setting.model = pcdag::ModelKind::nondag;
      if (args.pi < 0.0) throw pcdag::ContractViolation("--model nondag requires --pi");
      setting.pi = args.pi;
    } else {
      throw pcdag::ContractViolation("unknown model '" + args.model + "'");
    }
    setting.n = args.n;
  }
  setting.error.kind = parse_error_kind(args.error);
  if (!args.p_grid.empty()) setting.p_grid = args.p_grid;
  if (args.reps > 0) setting.replicates = args.reps;
  if (!args.methods.empty()) setting.methods = args.methods;
  if (!args.alpha_grid.empty()) setting.alpha_grid = args.alpha_grid;
  if (args.lambda_points > 0) setting.lambda_grid.points = args.lambda_points;
  if (args.lambda_decades > 0.0) setting.lambda_grid.decades = args.lambda_decades;
  if (args.n_dags > 0) setting.n_dags = args.n_dags;

  const pcdag::BenchmarkReport report = pcdag::run_benchmark(setting, manifest.seed, args.jobs);
  std::cerr << "benchmark '" << setting.name << "' finished in " << report.wall_clock_seconds
            << " s, excluded replicates: " << report.excluded_replicates << "\n";

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  write_text(out_dir / "report.csv", pcdag::report_to_csv(report));
  write_text(out_dir / "report.json", pcdag::report_to_json(report) + "\n");
  manifest.outputs = {"report.csv", "report.json"};
  if (args.dump_replicates) {
    write_text(out_dir / "replicates.csv", pcdag::replicate_records_to_csv(report));
    manifest.outputs.push_back("replicates.csv");
  }

  manifest.parameters = {{"setting", setting.name},
                         {"n", setting.n},
                         {"s", setting.s},
                         {"pi", setting.pi},
                         {"error", args.error},
                         {"p_grid", setting.p_grid},
                         {"replicates", setting.replicates},
                         {"methods", setting.methods},
                         {"alpha_grid", setting.alpha_grid},
                         {"lambda_points", setting.lambda_grid.points},
                         {"lambda_decades", setting.lambda_grid.decades},
                         {"n_dags", setting.n_dags},
                         {"jobs", args.jobs}};
  manifest.write(out_dir);
  return 0;
}

// ---------------------------------------------------------------- cv

struct CvArgs {
  std::string input;
  std::string method;
  std::vector<double> grid;
  int folds = 10;
  int n_dags = 10;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
};

int run_cv(const CvArgs& args, const std::vector<std::string>& argv) {
  ManifestWriter manifest;
  manifest.command = "cv";
  manifest.argv = argv;
  manifest.seed = args.seed_given ? args.seed : default_seed();

  if (args.grid.empty()) throw pcdag::ContractViolation("--grid must be non-empty");
  std::vector<double> grid;
  std::set<double> seen;
  for (double v : args.grid) {
    if (seen.insert(v).second) {
      grid.push_back(v);
    } else {
      std::cerr << "warning: duplicate grid value " << v << " dropped\n";
    }
  }

  const pcdag::Dataset data = pcdag::read_csv(args.input);
  manifest.inputs.push_back(args.input);
  const pcdag::EstimatorHandle method = pcdag::make_estimator(args.method, args.n_dags);

  std::string csv = "parameter,mean_negloglik,mean_nonzeros\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const pcdag::CvResult res = pcdag::kfold_cv_detailed(
        data, args.folds, method, grid[g], pcdag::Rng::derive_seed(manifest.seed, g));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", grid[g], res.mean_negloglik,
                  res.mean_nonzeros);
    csv += buf;
  }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  write_text(out_dir / "cv.csv", csv);
  manifest.parameters = {{"method", args.method},
                         {"grid", grid},
                         {"folds", args.folds},
                         {"n_dags", args.n_dags}};
  manifest.outputs = {"cv.csv"};
  manifest.write(out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DAG-based sparse covariance and precision estimation"};
  app.require_subcommand(1);

  std::vector<std::string> argv_copy(argv, argv + argc);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "draw a synthetic dataset with ground truth");
  simulate->add_option("--model", sim.model, "dag|nondag")->required();
  simulate->add_option("--p", sim.p, "dimension")->required();
  simulate->add_option("--n", sim.n, "sample size")->required();
  simulate->add_option("--s", sim.s, "DAG edge sparsity in (0,1)");
  simulate->add_option("--pi", sim.pi, "non-DAG off-diagonal probability");
  simulate->add_option("--error", sim.error, "gaussian|t3|cauchy (default gaussian)");
  simulate->add_flag("--random-sign", sim.random_sign, "flip weight signs at random");
  simulate->add_option("--seed", sim.seed, "master seed (default: PCDAG_SEED or 0)");
  simulate->add_option("--out-dir", sim.out_dir, "output directory")->required();

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand("estimate", "fit one estimator on a CSV dataset");
  estimate->add_option("--method", est.method, "pcdag|glasso|pcdag-robust|glasso-robust")
      ->required();
  estimate->add_option("--alpha", est.alpha, "PC significance level");
  estimate->add_option("--lambda", est.lambda, "graphical lasso penalty");
  estimate->add_option("--input", est.input, "headerless CSV, rows are observations")->required();
  estimate->add_option("--truth", est.truth_path, "truth JSON for loss reporting");
  estimate->add_option("--n-dags", est.n_dags, "DAG extensions to average (default 10)");
  estimate->add_option("--max-order", est.max_order, "cap on conditioning set size");
  estimate->add_option("--seed", est.seed, "seed for DAG sampling");
  estimate->add_option("--out-dir", est.out_dir, "output directory")->required();

  BenchmarkArgs bench;
  CLI::App* benchmark = app.add_subcommand("benchmark", "Monte-Carlo method comparison");
  benchmark->add_option("--setting", bench.setting, "named setting (D1-D4, nD1-nD4, R)");
  benchmark->add_option("--model", bench.model, "dag|nondag (custom settings)");
  benchmark->add_option("--n", bench.n, "sample size (custom settings)");
  benchmark->add_option("--s", bench.s, "DAG sparsity (custom settings)");
  benchmark->add_option("--pi", bench.pi, "non-DAG probability (custom settings)");
  benchmark->add_option("--error", bench.error, "gaussian|t3|cauchy");
  benchmark->add_option("--p-grid", bench.p_grid, "dimensions to sweep")->delimiter(',');
  benchmark->add_option("--reps", bench.reps, "replicates (default 50)");
  benchmark->add_option("--methods", bench.methods, "estimators to compare")->delimiter(',');
  benchmark->add_option("--alpha-grid", bench.alpha_grid, "PC tuning grid")->delimiter(',');
  benchmark->add_option("--lambda-points", bench.lambda_points, "lasso grid size (default 20)");
  benchmark->add_option("--lambda-decades", bench.lambda_decades,
                        "lasso grid span in decades (default 2)");
  benchmark->add_option("--n-dags", bench.n_dags, "DAG extensions to average");
  benchmark->add_option("--jobs", bench.jobs, "replicate-level worker threads");
  benchmark->add_flag("--dump-replicates", bench.dump_replicates, "write per-replicate losses");
  benchmark->add_option("--seed", bench.seed, "master seed");
  benchmark->add_option("--out-dir", bench.out_dir, "output directory")->required();

  CvArgs cv;
  CLI::App* cv_cmd = app.add_subcommand("cv", "k-fold CV curve over a tuning grid");
  cv_cmd->add_option("--input", cv.input, "headerless CSV")->required();
  cv_cmd->add_option("--method", cv.method, "pcdag|glasso|pcdag-robust|glasso-robust")->required();
  cv_cmd->add_option("--grid", cv.grid, "tuning parameter grid")->delimiter(',');
  cv_cmd->add_option("--folds", cv.folds, "folds (default 10)");
  cv_cmd->add_option("--n-dags", cv.n_dags, "DAG extensions to average");
  cv_cmd->add_option("--seed", cv.seed, "fold shuffle seed");
  cv_cmd->add_option("--out-dir", cv.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  sim.seed_given = simulate->count("--seed") > 0;
  est.seed_given = estimate->count("--seed") > 0;
  bench.seed_given = benchmark->count("--seed") > 0;
  cv.seed_given = cv_cmd->count("--seed") > 0;

  try {
    if (simulate->parsed()) return run_simulate(sim, argv_copy);
    if (estimate->parsed()) return run_estimate(est, argv_copy);
    if (benchmark->parsed()) return run_benchmark_cmd(bench, argv_copy);
    if (cv_cmd->parsed()) return run_cv(cv, argv_copy);
  } catch (const pcdag::ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pcdag::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
