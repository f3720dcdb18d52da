#ifndef PCDAG_EVAL_HPP
#define PCDAG_EVAL_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcdag/dagcov.hpp"
#include "pcdag/dataset.hpp"
#include "pcdag/simgen.hpp"

namespace pcdag {

// tr(Sigma Omega) - log det(Sigma Omega) - p. Zero iff Omega equals the
// inverse of sigma_true; requires omega_hat positive definite.
double kl_loss(const Matrix& sigma_true, const Matrix& omega_hat);

double frobenius_diff(const Matrix& m1, const Matrix& m2);

// Negative Gaussian log-likelihood of centered data under precision
// omega_hat: (n/2)[-log det Omega + tr(S Omega)] + (np/2) log(2pi) with
// S the divisor-n second-moment matrix of the rows. Rows are treated as
// draws from a zero-mean Gaussian, so callers center first (typically
// by a training mean).
double neg_gauss_loglik(const Matrix& omega_hat, const Matrix& centered_data);

// Entries with |value| > tol, diagonal included.
int nonzero_count(const Matrix& omega, double tol = 1e-8);

// Estimation method behind a tuning parameter. fit must be a pure
// function of (data, parameter, seed). fit_path, when set, produces the
// whole grid in one call (used for warm-started lasso paths) and must
// agree with per-point fits up to solver tolerance.
struct EstimatorHandle {
  std::string name;
  std::function<EstimationResult(const Dataset& train, double param, std::uint64_t seed)> fit;
  std::function<std::vector<EstimationResult>(const Dataset& train,
                                              const std::vector<double>& grid,
                                              std::uint64_t seed)>
      fit_path;
  // true: larger parameter = sparser fit (lambda); false: smaller =
  // sparser (alpha). Drives tie-breaking toward sparsity.
  bool sparser_at_large_param = true;
};

// Built-in methods: "pcdag", "glasso", "pcdag-robust", "glasso-robust".
EstimatorHandle make_estimator(const std::string& name, int n_dags = 10,
                               std::optional<int> max_order = std::nullopt);

struct GridPointRecord {
  double param = 0.0;
  bool ok = false;
  double negloglik = 0.0;
  int nnz = 0;
  // losses against truth, when available
  double kl = 0.0;
  double frob_sigma = 0.0;
  double frob_omega = 0.0;
};

struct TuneResult {
  double best_param = 0.0;
  int best_index = -1;
  std::vector<GridPointRecord> records;  // in grid order
};

// Fits every grid value on train, scores neg_gauss_loglik on the
// validation rows (centered by the training mean), and returns the
// minimizer; ties go to the sparser fit. Throws TuningError when every
// fit fails.
TuneResult tune_by_validation_detailed(const Dataset& train, const Dataset& valid,
                                       const EstimatorHandle& method,
                                       const std::vector<double>& grid, std::uint64_t seed,
                                       const Matrix* sigma_true = nullptr,
                                       const Matrix* omega_true = nullptr);
double tune_by_validation(const Dataset& train, const Dataset& valid,
                          const EstimatorHandle& method, const std::vector<double>& grid,
                          std::uint64_t seed = 0);

struct CvResult {
  double mean_negloglik = 0.0;
  double mean_nonzeros = 0.0;
  std::vector<double> fold_negloglik;
};

// Shuffle rows once with the seed, split contiguously into k folds;
// per fold, center the training split and apply the same centering to
// the held-out split, fit, and score. Returns the fold average.
CvResult kfold_cv_detailed(const Dataset& data, int folds, const EstimatorHandle& method,
                           double parameter, std::uint64_t seed);
double kfold_cv_loglik(const Dataset& data, int folds, const EstimatorHandle& method,
                       double parameter, std::uint64_t seed);

enum class ModelKind { dag, nondag };

struct LambdaGridSpec {
  int points = 20;
  double decades = 2.0;  // grid spans lambda_max down to lambda_max * 10^-decades
};

// One experimental configuration (model family, sizes, grids,
// replicate count). Named presets cover the simulation table settings.
struct BenchmarkSetting {
  std::string name = "custom";
  ModelKind model = ModelKind::dag;
  int n = 50;
  double s = 0.01;   // DAG models
  double pi = 0.1;   // non-DAG models
  std::vector<int> p_grid = {40};
  ErrorDistribution error;
  int replicates = 50;
  std::vector<double> alpha_grid = {0.0005, 0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.3};
  LambdaGridSpec lambda_grid;
  std::vector<std::string> methods = {"pcdag", "glasso"};
  int n_dags = 10;
  std::optional<int> max_order;

  void validate() const;
};

// Presets D1-D4 (DAG models), nD1-nD4 (non-DAG models), R (robustness
// setting). Throws ContractViolation for unknown names.
BenchmarkSetting named_setting(const std::string& name);
const std::vector<std::string>& known_setting_names();

struct ReportRow {
  std::string setting;
  int p = 0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double se = 0.0;  // NaN when replicates < 2
  int replicates = 0;
};

struct ReplicateRecord {
  int p = 0;
  int replicate = 0;
  std::string method;
  bool failed = false;
  std::map<std::string, double> metrics;
};

struct BenchmarkReport {
  std::string setting;
  std::uint64_t master_seed = 0;
  std::vector<ReportRow> rows;
  std::vector<ReplicateRecord> replicate_records;
  int excluded_replicates = 0;
  double wall_clock_seconds = 0.0;  // not serialized: reports must be byte-stable
};

// Monte-Carlo driver: per replicate draws a model, a training set and an
// equally sized validation set, tunes every method by validation, and
// scores the tuned fit against the known truth (KL, both Frobenius
// losses, nonzero count, chosen parameter, and the best-over-grid KL).
// A replicate failing for one method is excluded for all methods.
// Deterministic given master_seed, independent of jobs.
BenchmarkReport run_benchmark(const BenchmarkSetting& setting, std::uint64_t master_seed,
                              int jobs = 1);

// CSV columns: setting,p,method,metric,mean,se,replicates (SE empty when
// undefined).
std::string report_to_csv(const BenchmarkReport& report);
std::string report_to_json(const BenchmarkReport& report);
std::string replicate_records_to_csv(const BenchmarkReport& report);

}  // namespace pcdag

#endif
