#ifndef PCDAG_DAGCOV_HPP
#define PCDAG_DAGCOV_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcdag/dataset.hpp"
#include "pcdag/graph.hpp"
#include "pcdag/robust.hpp"

namespace pcdag {

// Regression system of a fixed DAG: row i of `a` has 1 on the diagonal
// and minus the regression coefficients of node i on its parents; `d`
// holds the conditional variances. Permuting rows/columns to a
// topological order makes `a` lower triangular.
struct DagLinearSystem {
  Matrix a;
  Vector d;
  std::vector<int> topological_order;
};

struct Regression {
  Vector beta;
  double variance = 0.0;
  bool used_pseudo_inverse = false;
  bool variance_floored = false;
};

// MLE covariance with divisor n.
Matrix sample_covariance(const Dataset& data);
Matrix sample_covariance(const Matrix& x);

// Coefficients and conditional variance of node i regressed on a parent
// set, read off sigma_init. Singular parent blocks fall back to a
// pseudo-inverse and set a flag; the variance is floored at a small
// positive fraction of the largest diagonal entry.
Regression regress_on_parents(const Matrix& sigma_init, int i, const std::vector<int>& pa);

DagLinearSystem dag_linear_system(const Matrix& sigma_init, const Dag& dag);

struct CovariancePair {
  Matrix sigma;
  Matrix omega;
};

// omega = A^T D^-1 A assembled directly; sigma from triangular solves
// in topological order. omega is positive definite whenever all d > 0.
CovariancePair dag_covariance(const DagLinearSystem& sys);

enum class InitialEstimator { mle, ogk };

struct PcDagOptions {
  double alpha = 0.01;
  int n_dags = 10;
  InitialEstimator initial = InitialEstimator::mle;
  std::uint64_t seed = 0;
  std::optional<int> max_order;
  OgkConfig ogk;
};

struct EstimationResult {
  Matrix sigma;
  Matrix omega;
  std::optional<Cpdag> cpdag;  // graph the estimate is based on (when any)
  double tuning = 0.0;         // alpha or lambda
  std::map<std::string, double> diagnostics;
};

// Full pipeline: PC on correlations of the chosen initial covariance,
// n_dags random consistent extensions with counter-derived seeds, one
// plug-in estimate per DAG, entrywise means of the sigma and omega
// estimates (averaged separately). If every extension fails, falls back
// to the empty DAG (diagonal estimate) and flags it.
EstimationResult pc_dag_estimate(const Dataset& data, const PcDagOptions& opts);

std::string estimation_result_to_json(const EstimationResult& r);

}  // namespace pcdag

#endif
