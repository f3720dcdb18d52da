#include "pcdag/robust.hpp"

#include <algorithm>
#include <cmath>

#include "pcdag/errors.hpp"

namespace pcdag {

namespace {

constexpr double kMadConsistency = 1.4826;  // Gaussian consistency factor

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double mad(const std::vector<double>& x) {
  const double med = median_of(x);
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - med);
  return median_of(dev);
}

// Robust scale that tolerates zero spread (used for the sum/difference
// vectors inside the pairwise estimator, where a constant genuinely has
// zero scale).
double scale_or_zero(const std::vector<double>& x) {
  const double m = mad(x);
  return m == 0.0 ? 0.0 : kMadConsistency * m;
}

std::vector<double> to_std(const Vector& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace

double robust_scale(const std::vector<double>& x) {
  if (x.size() < 2) throw ContractViolation("robust scale needs at least 2 observations");
  const double m = mad(x);
  if (m == 0.0) throw DegenerateScaleError("zero median absolute deviation");
  return kMadConsistency * m;
}

double robust_scale(const Vector& x) { return robust_scale(to_std(x)); }

double gk_pairwise_cov(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw ContractViolation("pairwise covariance needs equal lengths");
  const double sx = robust_scale(x);
  const double sy = robust_scale(y);
  const Eigen::Index n = x.size();
  std::vector<double> sum(static_cast<std::size_t>(n)), diff(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xs = x(i) / sx;
    const double ys = y(i) / sy;
    sum[static_cast<std::size_t>(i)] = xs + ys;
    diff[static_cast<std::size_t>(i)] = xs - ys;
  }
  const double s_plus = scale_or_zero(sum);
  const double s_minus = scale_or_zero(diff);
  return 0.25 * (s_plus * s_plus - s_minus * s_minus) * sx * sy;
}

OgkResult ogk_covariance(const Matrix& x, const OgkConfig& cfg) {
  if (x.rows() < 2) throw ContractViolation("OGK needs at least 2 observations");
  if (cfg.iterations < 1) throw ContractViolation("OGK needs at least one orthogonalization");
  if (!(cfg.psd_floor >= 0.0)) throw ContractViolation("psd_floor must be nonnegative");
  const Eigen::Index p = x.cols();

  OgkResult out;
  std::vector<double> scales(static_cast<std::size_t>(p), 0.0);
  std::vector<char> valid(static_cast<std::size_t>(p), 0);
  for (Eigen::Index j = 0; j < p; ++j) {
    try {
      scales[static_cast<std::size_t>(j)] = robust_scale(x.col(j));
      valid[static_cast<std::size_t>(j)] = 1;
    } catch (const DegenerateScaleError&) {
      out.excluded_columns.push_back(static_cast<int>(j));
    }
  }
  if (out.excluded_columns.size() == static_cast<std::size_t>(p)) {
    throw DegenerateScaleError("every column has zero spread");
  }

  Matrix cov = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!valid[static_cast<std::size_t>(i)]) continue;
    cov(i, i) = scales[static_cast<std::size_t>(i)] * scales[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (!valid[static_cast<std::size_t>(j)]) continue;
      const double value = gk_pairwise_cov(x.col(i), x.col(j));
      cov(i, j) = value;
      cov(j, i) = value;
    }
  }
  cov = ((cov + cov.transpose()) / 2.0).eval();

  // Orthogonalize: rescale along the current eigenvectors using robust
  // scales of the projected data.
  for (int it = 0; it < cfg.iterations; ++it) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Matrix& vectors = eig.eigenvectors();
    const Matrix projected = x * vectors;
    Vector gamma(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      const double s = scale_or_zero(to_std(projected.col(k)));
      gamma(k) = s * s;
    }
    cov = vectors * gamma.asDiagonal() * vectors.transpose();
    cov = ((cov + cov.transpose()) / 2.0).eval();
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const double largest = eig.eigenvalues().maxCoeff();
  if (!(largest > 0.0)) throw NumericalError("OGK produced no positive spread");
  const double floor_value = cfg.psd_floor * largest;
  Vector clipped = eig.eigenvalues().cwiseMax(floor_value);
  cov = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  out.cov = ((cov + cov.transpose()) / 2.0).eval();
  return out;
}

OgkResult ogk_covariance(const Dataset& data, const OgkConfig& cfg) {
  return ogk_covariance(data.x, cfg);
}

}  // namespace pcdag
