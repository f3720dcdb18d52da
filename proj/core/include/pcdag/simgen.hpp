#ifndef PCDAG_SIMGEN_HPP
#define PCDAG_SIMGEN_HPP

#include <optional>

#include "pcdag/dataset.hpp"
#include "pcdag/graph.hpp"
#include "pcdag/rng.hpp"

namespace pcdag {

// Recursive linear model X_i = sum_{r<i} B_ir X_r + e_i with unit
// Gaussian errors; edge r -> i whenever B_ir != 0.
struct DagModel {
  Matrix b;  // strictly lower triangular weights
  Dag dag;
  Matrix sigma_true;
  Matrix omega_true;
  double sparsity = 0.0;
};

// Precision matrix B + delta*I with symmetric 0/0.5 off-diagonals and
// delta solved so the condition number equals p.
struct NonDagModel {
  Matrix omega_true;
  Matrix sigma_true;
  double delta = 0.0;
  double pi = 0.0;
  bool degenerate = false;  // B == 0: no delta gives condition number p
};

enum class ErrorKind { gaussian, t3_contaminated, cauchy_contaminated };

// Mixtures are 0.9 N(0,1) + 0.1 component, drawn i.i.d. per error
// coordinate; the contamination fraction is fixed.
struct ErrorDistribution {
  ErrorKind kind = ErrorKind::gaussian;
  static constexpr double contamination = 0.1;
};

// Lower-triangle Bernoulli(s) support with Uniform[0.1, 1] weights
// (positive as-is; random_sign flips each weight's sign with prob 1/2
// for sensitivity checks).
DagModel sample_dag_model(int p, double s, Rng& rng, bool random_sign = false);

NonDagModel sample_nondag_model(int p, double pi, Rng& rng);

// DAG models simulate the recursion with errors from err; contamination
// enters through the errors only.
Dataset sample_data(const DagModel& model, int n, ErrorDistribution err, Rng& rng);

// Gaussian sampling through a symmetric square root of sigma_true;
// non-Gaussian errors are unsupported here and raise ContractViolation.
Dataset sample_data(const NonDagModel& model, int n, ErrorDistribution err, Rng& rng);
Dataset sample_data_gaussian(const Matrix& sigma, int n, Rng& rng);

// lambda_max / lambda_min of a symmetric matrix; +inf when the smallest
// eigenvalue is <= 0.
double condition_number(const Matrix& m);

}  // namespace pcdag

#endif
