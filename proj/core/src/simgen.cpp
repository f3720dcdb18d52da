#include "pcdag/simgen.hpp"

#include <cmath>
#include <limits>

#include "pcdag/errors.hpp"

namespace pcdag {

namespace {

Matrix truth_sigma_from_weights(const Matrix& b) {
  const Eigen::Index p = b.rows();
  const Matrix a = Matrix::Identity(p, p) - b;  // unit lower triangular
  const Matrix inv_a = a.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p));
  Matrix sigma = inv_a * inv_a.transpose();
  return ((sigma + sigma.transpose()) / 2.0).eval();
}

}  // namespace

DagModel sample_dag_model(int p, double s, Rng& rng, bool random_sign) {
  if (p < 2) throw ContractViolation("DAG model needs p >= 2");
  if (!(s > 0.0 && s < 1.0)) throw ContractViolation("sparsity must lie in (0,1)");

  DagModel model{Matrix::Zero(p, p), Dag(PartiallyDirectedGraph(p)), Matrix(), Matrix(), s};
  PartiallyDirectedGraph g(p);
  for (int i = 1; i < p; ++i) {
    for (int r = 0; r < i; ++r) {
      if (rng.bernoulli(s)) {
        double weight = rng.uniform(0.1, 1.0);
        if (random_sign && rng.bernoulli(0.5)) weight = -weight;
        model.b(i, r) = weight;
        g.add_directed(r, i);
      }
    }
  }
  model.dag = Dag(std::move(g));
  model.sigma_true = truth_sigma_from_weights(model.b);
  const Matrix a = Matrix::Identity(p, p) - model.b;
  model.omega_true = ((a.transpose() * a + (a.transpose() * a).transpose()) / 2.0).eval();
  return model;
}

NonDagModel sample_nondag_model(int p, double pi, Rng& rng) {
  if (p < 2) throw ContractViolation("non-DAG model needs p >= 2");
  if (!(pi >= 0.0 && pi <= 1.0)) throw ContractViolation("pi must lie in [0,1]");

  NonDagModel model;
  model.pi = pi;
  Matrix b = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (rng.bernoulli(pi)) {
        b(i, j) = 0.5;
        b(j, i) = 0.5;
      }
    }
  }

  if (b.cwiseAbs().maxCoeff() == 0.0) {
    // B = 0: cond(delta I) = 1 for every delta, so the target condition
    // number p is unreachable.
    model.degenerate = true;
    model.delta = 0.0;
    model.omega_true = Matrix::Identity(p, p);
    model.sigma_true = Matrix::Identity(p, p);
    return model;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double target = static_cast<double>(p);

  // (hi + delta) / (lo + delta) = p has the closed-form root below; it
  // is positive definite whenever hi > lo.
  double delta = (hi - target * lo) / (target - 1.0);
  if (!(lo + delta > 0.0)) {
    // Fall back to bisection on the condition-number function, which is
    // monotone decreasing in delta on the positive definite region.
    double left = -lo + 1e-12 * std::max(1.0, std::abs(lo));
    double right = std::max(1.0, -lo * 2.0 + 1.0);
    auto cond_at = [&](double d) { return (hi + d) / (lo + d); };
    while (cond_at(right) > target) right *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (left + right);
      if (cond_at(mid) > target) {
        left = mid;
      } else {
        right = mid;
      }
      if ((right - left) <= 1e-9 * std::max(1.0, std::abs(right))) break;
    }
    delta = 0.5 * (left + right);
  }

  model.delta = delta;
  model.omega_true = b + delta * Matrix::Identity(p, p);
  Eigen::LLT<Matrix> llt(model.omega_true);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("non-DAG precision construction lost positive definiteness");
  }
  Matrix sigma = llt.solve(Matrix::Identity(p, p));
  model.sigma_true = ((sigma + sigma.transpose()) / 2.0).eval();
  return model;
}

namespace {

double draw_error(ErrorKind kind, Rng& rng) {
  switch (kind) {
    case ErrorKind::gaussian:
      return rng.normal();
    case ErrorKind::t3_contaminated:
      return rng.uniform() < ErrorDistribution::contamination ? rng.student_t(3.0) : rng.normal();
    case ErrorKind::cauchy_contaminated:
      return rng.uniform() < ErrorDistribution::contamination ? rng.cauchy() : rng.normal();
  }
  throw ContractViolation("unknown error distribution");
}

}  // namespace

Dataset sample_data(const DagModel& model, int n, ErrorDistribution err, Rng& rng) {
  if (n < 1) throw ContractViolation("sample size must be at least 1");
  const int p = static_cast<int>(model.b.rows());
  Dataset data;
  data.x.resize(n, p);
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < p; ++i) {
      double value = draw_error(err.kind, rng);
      for (int k = 0; k < i; ++k) {
        if (model.b(i, k) != 0.0) value += model.b(i, k) * data.x(r, k);
      }
      data.x(r, i) = value;
    }
  }
  data.truth = GroundTruth{model.sigma_true, model.omega_true, model.dag};
  return data;
}

Dataset sample_data_gaussian(const Matrix& sigma, int n, Rng& rng) {
  if (n < 1) throw ContractViolation("sample size must be at least 1");
  if (sigma.rows() != sigma.cols()) throw ContractViolation("sigma must be square");
  const Eigen::Index p = sigma.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(((sigma + sigma.transpose()) / 2.0).eval());
  const Matrix root =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
      eig.eigenvectors().transpose();
  Dataset data;
  data.x.resize(n, p);
  Vector z(p);
  for (int r = 0; r < n; ++r) {
    for (Eigen::Index i = 0; i < p; ++i) z(i) = rng.normal();
    data.x.row(r) = (root * z).transpose();
  }
  return data;
}

Dataset sample_data(const NonDagModel& model, int n, ErrorDistribution err, Rng& rng) {
  if (err.kind != ErrorKind::gaussian) {
    throw ContractViolation("contaminated errors are only defined for DAG models");
  }
  Dataset data = sample_data_gaussian(model.sigma_true, n, rng);
  data.truth = GroundTruth{model.sigma_true, model.omega_true, std::nullopt};
  return data;
}

double condition_number(const Matrix& m) {
  if (m.rows() != m.cols()) throw ContractViolation("condition number needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(((m + m.transpose()) / 2.0).eval());
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace pcdag
