#ifndef PCDAG_ROBUST_HPP
#define PCDAG_ROBUST_HPP

#include <vector>

#include "pcdag/dataset.hpp"

namespace pcdag {

enum class RobustScale { mad };  // MAD with Gaussian consistency factor

struct OgkConfig {
  int iterations = 2;        // orthogonalization passes
  RobustScale scale = RobustScale::mad;
  double psd_floor = 1e-8;   // eigenvalue floor as a fraction of the largest
};

// 1.4826 * median(|x - median(x)|). Throws DegenerateScaleError when the
// MAD is zero; callers that can tolerate zero spread handle it.
double robust_scale(const std::vector<double>& x);
double robust_scale(const Vector& x);

// Pairwise robust covariance from the scale identity
// 0.25 * (scale(x/sx + y/sy)^2 - scale(x/sx - y/sy)^2) * sx * sy.
double gk_pairwise_cov(const Vector& x, const Vector& y);

struct OgkResult {
  Matrix cov;
  std::vector<int> excluded_columns;  // zero robust scale
};

// Orthogonalized pairwise estimator: raw pairwise matrix, then
// `iterations` rounds of eigendecompose / rescale along eigenvectors,
// finally eigenvalues clipped up to psd_floor * (largest eigenvalue).
OgkResult ogk_covariance(const Dataset& data, const OgkConfig& cfg = {});
OgkResult ogk_covariance(const Matrix& x, const OgkConfig& cfg = {});

}  // namespace pcdag

#endif
