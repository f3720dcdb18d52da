#include "pcdag/glasso.hpp"

#include <algorithm>
#include <cmath>

#include "pcdag/errors.hpp"

namespace pcdag {

void GlassoConfig::validate() const {
  if (!(lambda >= 0.0)) throw ContractViolation("lambda must be nonnegative");
  if (!(tol > 0.0)) throw ContractViolation("tol must be positive");
  if (max_iter < 1) throw ContractViolation("max_iter must be at least 1");
}

namespace {

void validate_input(const Matrix& s) {
  if (s.rows() != s.cols()) throw ContractViolation("covariance input must be square");
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    if (!(s(i, i) > 0.0)) {
      throw ContractViolation("covariance input must have strictly positive diagonal");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      const double scale = std::max({std::abs(s(i, j)), std::abs(s(j, i)), 1.0});
      if (std::abs(s(i, j) - s(j, i)) > 1e-8 * scale) {
        throw ContractViolation("covariance input must be symmetric");
      }
    }
  }
}

double penalized_negloglik(const Matrix& s, double lambda, const Matrix& omega,
                           bool penalize_diagonal) {
  Eigen::LLT<Matrix> llt(omega);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("precision iterate lost positive definiteness");
  }
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < omega.rows(); ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
  const double trace_term = (s.array() * omega.array()).sum();
  double penalty = omega.cwiseAbs().sum() - omega.diagonal().cwiseAbs().sum();
  if (penalize_diagonal) penalty += omega.diagonal().cwiseAbs().sum();
  return -logdet + trace_term + lambda * penalty;
}

Matrix spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError(what);
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return ((inv + inv.transpose()) / 2.0).eval();
}

}  // namespace

double glasso_lambda_max(const Matrix& s) {
  validate_input(s);
  double best = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < s.cols(); ++j) best = std::max(best, std::abs(s(i, j)));
  }
  return best;
}

double glasso_scale(const Matrix& s) {
  const Eigen::Index p = s.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i != j) sum += std::abs(s(i, j));
    }
  }
  if (p > 1 && sum > 0.0) return sum / static_cast<double>(p * (p - 1));
  return s.diagonal().cwiseAbs().mean();
}

GlassoResult glasso_fit(const Matrix& s, const GlassoConfig& cfg, const Matrix* warm_start) {
  cfg.validate();
  validate_input(s);
  const Eigen::Index p = s.rows();
  const double lambda = cfg.lambda;

  GlassoResult out;
  if (p == 1) {
    const double sigma11 = s(0, 0) + (cfg.penalize_diagonal ? lambda : 0.0);
    out.sigma = Matrix::Constant(1, 1, sigma11);
    out.omega = Matrix::Constant(1, 1, 1.0 / sigma11);
    out.converged = true;
    out.objective_per_sweep.push_back(
        penalized_negloglik(s, lambda, out.omega, cfg.penalize_diagonal));
    return out;
  }

  Matrix omega;
  if (warm_start != nullptr) {
    if (warm_start->rows() != p || warm_start->cols() != p) {
      throw ContractViolation("warm start has wrong dimensions");
    }
    omega = ((*warm_start + warm_start->transpose()) / 2.0).eval();
  } else {
    Vector start_diag = s.diagonal();
    if (cfg.penalize_diagonal) start_diag.array() += lambda;
    omega = start_diag.cwiseInverse().asDiagonal();
  }

  const double scale = glasso_scale(s);
  const double sweep_tol = cfg.tol * scale;
  // Convergence additionally requires the stationarity residual to clear
  // this target; the mean-change test alone can stop with residuals near
  // the acceptance bound. Unpenalized fits are driven to the numerical
  // floor so they reproduce the direct inverse.
  const double kkt_target =
      lambda > 0.0 ? 2.0 * cfg.tol * scale : 1e-10 * s.diagonal().maxCoeff();
  const bool diag_pen = cfg.penalize_diagonal;
  const double inner_tol = 0.05 * kkt_target;  // in covariance units
  constexpr int kMaxInnerPasses = 200;

  Matrix w = spd_inverse(omega, "glasso start is not positive definite");

  std::vector<Eigen::Index> others(static_cast<std::size_t>(p - 1));
  Vector u(p - 1), s12(p - 1), mu(p - 1);
  Matrix m(p - 1, p - 1);

  for (int sweep = 0; sweep < cfg.max_iter; ++sweep) {
    // Fresh inverse each sweep so Schur complements do not drift.
    w = spd_inverse(omega, "precision iterate lost positive definiteness");
    const Matrix w_before = w;

    for (Eigen::Index j = 0; j < p; ++j) {
      int t = 0;
      for (Eigen::Index v = 0; v < p; ++v) {
        if (v != j) others[static_cast<std::size_t>(t++)] = v;
      }
      const double s22 = s(j, j) + (diag_pen ? lambda : 0.0);
      for (Eigen::Index r = 0; r < p - 1; ++r) {
        const Eigen::Index vr = others[static_cast<std::size_t>(r)];
        s12(r) = s(vr, j);
        u(r) = omega(vr, j);
        for (Eigen::Index c = 0; c < p - 1; ++c) {
          m(r, c) = w(vr, others[static_cast<std::size_t>(c)]);
        }
      }
      // Schur complement: inverse of omega with row/column j removed.
      const double w22 = w(j, j);
      for (Eigen::Index r = 0; r < p - 1; ++r) {
        const double wr = w(others[static_cast<std::size_t>(r)], j);
        for (Eigen::Index c = 0; c < p - 1; ++c) {
          m(r, c) -= wr * w(others[static_cast<std::size_t>(c)], j) / w22;
        }
      }

      mu.noalias() = m * u;
      // Lasso in the j-th precision column:
      //   min_u  s22 u^T M u + 2 s12^T u + 2 lambda ||u||_1
      for (int pass = 0; pass < kMaxInnerPasses; ++pass) {
        double worst = 0.0;
        for (Eigen::Index k = 0; k < p - 1; ++k) {
          const double mkk = m(k, k);
          const double residual = s12(k) + s22 * (mu(k) - mkk * u(k));
          double next = 0.0;
          if (residual > lambda) {
            next = -(residual - lambda) / (s22 * mkk);
          } else if (residual < -lambda) {
            next = -(residual + lambda) / (s22 * mkk);
          }
          const double delta = next - u(k);
          if (delta != 0.0) {
            u(k) = next;
            mu.noalias() += delta * m.col(k);
            worst = std::max(worst, std::abs(delta) * s22 * mkk);
          }
        }
        if (worst <= inner_tol) break;
      }

      const double gamma = 1.0 / s22;
      const double omega22 = gamma + u.dot(mu);
      for (Eigen::Index r = 0; r < p - 1; ++r) {
        const Eigen::Index vr = others[static_cast<std::size_t>(r)];
        omega(vr, j) = u(r);
        omega(j, vr) = u(r);
      }
      omega(j, j) = omega22;

      // Rank-one refresh of the cached inverse for the new column.
      for (Eigen::Index r = 0; r < p - 1; ++r) {
        const Eigen::Index vr = others[static_cast<std::size_t>(r)];
        w(vr, j) = -s22 * mu(r);
        w(j, vr) = w(vr, j);
        for (Eigen::Index c = 0; c <= r; ++c) {
          const Eigen::Index vc = others[static_cast<std::size_t>(c)];
          const double value = m(r, c) + s22 * mu(r) * mu(c);
          w(vr, vc) = value;
          w(vc, vr) = value;
        }
      }
      w(j, j) = s22;
    }

    ++out.sweeps;
    out.objective_per_sweep.push_back(penalized_negloglik(s, lambda, omega, diag_pen));
    const double mean_change = (w - w_before).cwiseAbs().mean();
    if (mean_change <= sweep_tol &&
        glasso_kkt_residual(s, lambda, omega, w, diag_pen) <= kkt_target) {
      out.converged = true;
      break;
    }
  }

  out.omega = ((omega + omega.transpose()) / 2.0).eval();
  out.sigma = spd_inverse(out.omega, "fitted precision is not positive definite");
  return out;
}

double glasso_kkt_residual(const Matrix& s, double lambda, const Matrix& omega,
                           const Matrix& sigma, bool penalize_diagonal) {
  if (s.rows() != omega.rows() || s.rows() != sigma.rows()) {
    throw ContractViolation("dimension mismatch in KKT residual");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double diag_sub = penalize_diagonal ? lambda * (omega(i, i) > 0.0 ? 1.0 : -1.0) : 0.0;
    worst = std::max(worst, std::abs(s(i, i) - sigma(i, i) + diag_sub));
    for (Eigen::Index j = i + 1; j < s.cols(); ++j) {
      const double grad = s(i, j) - sigma(i, j);
      if (omega(i, j) != 0.0) {
        worst = std::max(worst, std::abs(grad + lambda * (omega(i, j) > 0.0 ? 1.0 : -1.0)));
      } else {
        worst = std::max(worst, std::max(std::abs(grad) - lambda, 0.0));
      }
    }
  }
  return worst;
}

std::vector<GlassoResult> glasso_path(const Matrix& s, const std::vector<double>& lambdas,
                                      double tol, int max_iter, bool penalize_diagonal) {
  std::vector<GlassoResult> out;
  out.reserve(lambdas.size());
  const Matrix* warm = nullptr;
  for (double lambda : lambdas) {
    GlassoConfig cfg;
    cfg.lambda = lambda;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.penalize_diagonal = penalize_diagonal;
    out.push_back(glasso_fit(s, cfg, warm));
    warm = &out.back().omega;
  }
  return out;
}

}  // namespace pcdag
