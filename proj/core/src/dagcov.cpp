#include "pcdag/dagcov.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "pcdag/errors.hpp"
#include "pcdag/pcalg.hpp"

namespace pcdag {

namespace {
// Fraction of the largest diagonal entry used as the conditional
// variance floor; keeps the plug-in precision matrix positive definite
// when |pa(i)| approaches n.
constexpr double kVarianceFloorFraction = 1e-8;
constexpr double kPseudoInverseCutoff = 1e-12;
}  // namespace

Matrix sample_covariance(const Matrix& x) {
  const Eigen::Index n = x.rows();
  if (n < 1) throw ContractViolation("sample covariance needs at least one observation");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - mean;
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
  cov = ((cov + cov.transpose()) / 2.0).eval();
  return cov;
}

Matrix sample_covariance(const Dataset& data) { return sample_covariance(data.x); }

Regression regress_on_parents(const Matrix& sigma_init, int i, const std::vector<int>& pa) {
  const int p = static_cast<int>(sigma_init.rows());
  if (sigma_init.rows() != sigma_init.cols()) {
    throw ContractViolation("sigma_init must be square");
  }
  if (i < 0 || i >= p) throw ContractViolation("node index out of range");
  for (int v : pa) {
    if (v < 0 || v >= p) throw ContractViolation("parent index out of range");
    if (v == i) throw ContractViolation("parent set contains the node itself");
  }

  const double floor_value = kVarianceFloorFraction * sigma_init.diagonal().maxCoeff();
  Regression out;
  if (pa.empty()) {
    out.beta.resize(0);
    out.variance = sigma_init(i, i);
  } else {
    const int m = static_cast<int>(pa.size());
    Matrix s_pp(m, m);
    Vector s_pi(m);
    for (int r = 0; r < m; ++r) {
      s_pi(r) = sigma_init(pa[r], i);
      for (int c = 0; c < m; ++c) s_pp(r, c) = sigma_init(pa[r], pa[c]);
    }
    Eigen::LLT<Matrix> llt(s_pp);
    bool solved = false;
    if (llt.info() == Eigen::Success) {
      const Matrix& l = llt.matrixLLT();
      double min_pivot = l(0, 0);
      for (int d = 1; d < m; ++d) min_pivot = std::min(min_pivot, l(d, d));
      if (min_pivot * min_pivot > kPseudoInverseCutoff * s_pp.diagonal().maxCoeff()) {
        out.beta = llt.solve(s_pi);
        solved = true;
      }
    }
    if (!solved) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(s_pp);
      const Vector& ev = eig.eigenvalues();
      const double cutoff = kPseudoInverseCutoff * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
      Vector inv = Vector::Zero(m);
      for (int d = 0; d < m; ++d) {
        if (ev(d) > cutoff) inv(d) = 1.0 / ev(d);
      }
      out.beta = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * s_pi;
      out.used_pseudo_inverse = true;
    }
    out.variance = sigma_init(i, i) - out.beta.dot(s_pi);
  }
  if (out.variance < floor_value) {
    out.variance = floor_value;
    out.variance_floored = true;
  }
  return out;
}

DagLinearSystem dag_linear_system(const Matrix& sigma_init, const Dag& dag) {
  const int p = dag.node_count();
  if (sigma_init.rows() != p || sigma_init.cols() != p) {
    throw ContractViolation("sigma_init dimension does not match the DAG");
  }
  for (int i = 0; i < p; ++i) {
    if (!(sigma_init(i, i) > 0.0)) {
      throw ContractViolation("sigma_init must have strictly positive diagonal");
    }
  }
  DagLinearSystem sys;
  sys.a = Matrix::Identity(p, p);
  sys.d = Vector::Zero(p);
  sys.topological_order = dag.topological_order();
  for (int i = 0; i < p; ++i) {
    const std::vector<int> pa = dag.parents(i);
    const Regression reg = regress_on_parents(sigma_init, i, pa);
    for (std::size_t t = 0; t < pa.size(); ++t) sys.a(i, pa[t]) = -reg.beta(static_cast<int>(t));
    sys.d(i) = reg.variance;
  }
  return sys;
}

CovariancePair dag_covariance(const DagLinearSystem& sys) {
  const Eigen::Index p = sys.a.rows();
  if (sys.a.cols() != p || sys.d.size() != p ||
      static_cast<Eigen::Index>(sys.topological_order.size()) != p) {
    throw ContractViolation("inconsistent DAG linear system");
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(sys.d(i) > 0.0)) {
      throw NumericalError("nonpositive conditional variance: estimate not positive definite");
    }
  }

  CovariancePair out;
  out.omega = sys.a.transpose() * sys.d.cwiseInverse().asDiagonal() * sys.a;
  out.omega = ((out.omega + out.omega.transpose()) / 2.0).eval();

  // In topological order the regression matrix is unit lower triangular,
  // so sigma = A^-1 D A^-T comes from two triangular solves.
  Matrix a_perm(p, p);
  Vector d_perm(p);
  const std::vector<int>& order = sys.topological_order;
  for (Eigen::Index r = 0; r < p; ++r) {
    d_perm(r) = sys.d(order[r]);
    for (Eigen::Index c = 0; c < p; ++c) a_perm(r, c) = sys.a(order[r], order[c]);
  }
  const Matrix inv_a = a_perm.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p));
  const Matrix sigma_perm = inv_a * d_perm.asDiagonal() * inv_a.transpose();
  out.sigma.resize(p, p);
  for (Eigen::Index r = 0; r < p; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) out.sigma(order[r], order[c]) = sigma_perm(r, c);
  }
  out.sigma = ((out.sigma + out.sigma.transpose()) / 2.0).eval();
  return out;
}

namespace {

int count_nonzeros(const Matrix& m, double tol) {
  int count = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > tol) ++count;
    }
  }
  return count;
}

}  // namespace

EstimationResult pc_dag_estimate(const Dataset& data, const PcDagOptions& opts) {
  if (data.n() < 4) throw ContractViolation("pc_dag_estimate needs n >= 4");
  if (opts.n_dags < 1) throw ContractViolation("n_dags must be at least 1");

  EstimationResult out;
  out.tuning = opts.alpha;

  Matrix initial;
  if (opts.initial == InitialEstimator::mle) {
    initial = sample_covariance(data);
  } else {
    OgkResult ogk = ogk_covariance(data, opts.ogk);
    initial = std::move(ogk.cov);
    out.diagnostics["ogk_excluded_columns"] = static_cast<double>(ogk.excluded_columns.size());
  }

  const Matrix corr = correlation_from_covariance(initial);
  PcResult pc = pc_cpdag(corr, data.n(), opts.alpha, opts.max_order);
  out.cpdag = pc.cpdag;
  out.diagnostics["ci_tests"] = static_cast<double>(pc.diag.ci_tests);
  out.diagnostics["singular_ci_tests"] = static_cast<double>(pc.diag.singular_tests);
  out.diagnostics["degenerate_ci_tests"] = static_cast<double>(pc.diag.degenerate_tests);
  out.diagnostics["vstructure_conflicts"] = static_cast<double>(pc.diag.vstructure_conflicts);
  out.diagnostics["orientation_retries"] = static_cast<double>(pc.diag.orientation_retries);
  out.diagnostics["invalid_cpdag"] = pc.diag.invalid_cpdag ? 1.0 : 0.0;

  const int p = data.p();
  Matrix sigma_sum = Matrix::Zero(p, p);
  Matrix omega_sum = Matrix::Zero(p, p);
  int successes = 0;
  int failures = 0;
  Rng master(opts.seed);
  for (int t = 0; t < opts.n_dags; ++t) {
    Rng stream = master.stream(static_cast<std::uint64_t>(t));
    try {
      const Dag dag = extend_to_dag(pc.cpdag, stream);
      CovariancePair pair = dag_covariance(dag_linear_system(initial, dag));
      sigma_sum += pair.sigma;
      omega_sum += pair.omega;
      ++successes;
    } catch (const InvalidCpdagError&) {
      ++failures;
    }
  }
  out.diagnostics["extension_failures"] = static_cast<double>(failures);

  if (successes == 0) {
    // Nothing extendable: diagonal estimate from the empty DAG.
    Dag empty{PartiallyDirectedGraph(p)};
    CovariancePair pair = dag_covariance(dag_linear_system(initial, empty));
    sigma_sum = pair.sigma;
    omega_sum = pair.omega;
    successes = 1;
    out.diagnostics["empty_graph_fallback"] = 1.0;
  }

  out.sigma = sigma_sum / static_cast<double>(successes);
  out.omega = omega_sum / static_cast<double>(successes);
  out.diagnostics["dags_averaged"] = static_cast<double>(successes);
  out.diagnostics["omega_nonzeros"] = static_cast<double>(count_nonzeros(out.omega, 1e-8));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.sigma);
  out.diagnostics["sigma_min_eigenvalue"] = eig.eigenvalues().minCoeff();
  out.diagnostics["inverse_pair_deviation"] =
      (out.omega * out.sigma - Matrix::Identity(p, p)).cwiseAbs().maxCoeff();
  return out;
}

std::string estimation_result_to_json(const EstimationResult& r) {
  nlohmann::ordered_json j;
  const Eigen::Index p = r.sigma.rows();
  j["p"] = p;
  auto flatten = [](const Matrix& m) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(i, c));
    }
    return v;
  };
  j["sigma"] = flatten(r.sigma);
  j["omega"] = flatten(r.omega);
  if (r.cpdag.has_value()) {
    j["graph"] = nlohmann::ordered_json::parse(graph_to_json(r.cpdag->graph()));
  } else {
    j["graph"] = nullptr;
  }
  j["tuning"] = r.tuning;
  nlohmann::ordered_json diag;
  for (const auto& [key, value] : r.diagnostics) diag[key] = value;
  j["diagnostics"] = std::move(diag);
  return j.dump();
}

}  // namespace pcdag
