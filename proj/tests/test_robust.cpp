#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pcdag/dagcov.hpp"
#include "pcdag/robust.hpp"
#include "pcdag/rng.hpp"
#include "pcdag/simgen.hpp"

using namespace pcdag;

TEST_CASE("robust scale of a symmetric three-point sample") {
  CHECK(robust_scale(std::vector<double>{-1.0, 0.0, 1.0}) == doctest::Approx(1.4826).epsilon(1e-12));
}

TEST_CASE("robust scale is absolutely homogeneous") {
  Rng rng(4);
  std::vector<double> x(41);
  for (double& v : x) v = rng.normal();
  const double base = robust_scale(x);
  for (double c : {2.0, -3.5, 0.25}) {
    std::vector<double> scaled = x;
    for (double& v : scaled) v *= c;
    CHECK(robust_scale(scaled) == doctest::Approx(std::abs(c) * base).epsilon(1e-12));
  }
}

TEST_CASE("robust scale is Gaussian consistent") {
  Rng rng(8);
  std::vector<double> x(4000);
  for (double& v : x) v = rng.normal();
  CHECK(robust_scale(x) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("robust scale contracts") {
  CHECK_THROWS_AS(robust_scale(std::vector<double>{1.0}), ContractViolation);
  CHECK_THROWS_AS(robust_scale(std::vector<double>{2.0, 2.0, 2.0, 2.0}), DegenerateScaleError);
}

TEST_CASE("pairwise covariance identities") {
  Rng rng(12);
  Vector x(101);
  for (int i = 0; i < x.size(); ++i) x(i) = rng.normal() * 1.7;
  const double sx = robust_scale(x);
  CHECK(gk_pairwise_cov(x, x) == doctest::Approx(sx * sx).epsilon(1e-10));
  CHECK(gk_pairwise_cov(x, (-x).eval()) == doctest::Approx(-sx * sx).epsilon(1e-10));
}

TEST_CASE("pairwise covariance of independent normals is near zero") {
  Rng rng(16);
  Vector x(10000), y(10000);
  for (int i = 0; i < x.size(); ++i) {
    x(i) = rng.normal();
    y(i) = rng.normal();
  }
  CHECK(std::abs(gk_pairwise_cov(x, y)) < 0.05);
}

TEST_CASE("pairwise covariance scale equivariance") {
  Rng rng(20);
  Vector x(301), y(301);
  for (int i = 0; i < x.size(); ++i) {
    x(i) = rng.normal();
    y(i) = 0.6 * x(i) + 0.8 * rng.normal();
  }
  const double base = gk_pairwise_cov(x, y);
  const double a = 2.5, b = 4.0;
  CHECK(gk_pairwise_cov((a * x).eval(), (b * y).eval()) ==
        doctest::Approx(a * b * base).epsilon(1e-9));
}

TEST_CASE("pairwise covariance needs equal lengths") {
  CHECK_THROWS_AS(gk_pairwise_cov(Vector::Ones(5), Vector::Ones(6)), ContractViolation);
}

TEST_CASE("clean Gaussian data: orthogonalized estimate tracks the sample covariance") {
  // AR(1)-style covariance with solid entries everywhere
  const int p = 4;
  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(0.6, std::abs(i - j));
  }
  Rng rng(24);
  const Dataset data = sample_data_gaussian(sigma, 20000, rng);
  const Matrix s = sample_covariance(data);
  const OgkResult ogk = ogk_covariance(data);
  CHECK(ogk.excluded_columns.empty());
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      CHECK(std::abs(ogk.cov(i, j) - s(i, j)) <= 0.1 * std::abs(s(i, j)));
    }
  }
}

TEST_CASE("duplicated column stays positive semidefinite after clipping") {
  Rng rng(28);
  Matrix x(60, 4);
  for (int r = 0; r < 60; ++r) {
    for (int c = 0; c < 3; ++c) x(r, c) = rng.normal();
    x(r, 3) = x(r, 0);
  }
  const OgkResult ogk = ogk_covariance(x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ogk.cov);
  CHECK(eig.eigenvalues().minCoeff() >= 0.0);
  // floor keeps it invertible for downstream partial correlations
  CHECK(eig.eigenvalues().minCoeff() >= 0.5e-8 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("heavy contamination: robust diagonal stays bounded, sample diagonal explodes") {
  Rng rng(32);
  const int n = 1000, p = 5;
  Matrix x(n, p);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < p; ++c) {
      x(r, c) = rng.uniform() < 0.1 ? rng.cauchy() : rng.normal();
    }
  }
  const Matrix s = sample_covariance(x);
  const OgkResult ogk = ogk_covariance(x);
  CHECK(s.diagonal().maxCoeff() > 10.0);
  CHECK(ogk.cov.diagonal().maxCoeff() < 5.0);
  CHECK(ogk.cov.diagonal().minCoeff() > 0.3);
}

TEST_CASE("permutation equivariance") {
  Rng rng(36);
  const int p = 5;
  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(0.5, std::abs(i - j)) * (1.0 + 0.2 * i * (i == j));
  }
  const Dataset data = sample_data_gaussian(((sigma + sigma.transpose()) / 2.0).eval(), 400, rng);
  const std::vector<int> perm = {3, 0, 4, 1, 2};
  Matrix permuted(data.n(), p);
  for (int c = 0; c < p; ++c) permuted.col(c) = data.x.col(perm[c]);
  const Matrix direct = ogk_covariance(data).cov;
  const Matrix shuffled = ogk_covariance(permuted).cov;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      CHECK(shuffled(i, j) == doctest::Approx(direct(perm[i], perm[j])).epsilon(1e-9));
    }
  }
}

TEST_CASE("degenerate columns are excluded and reported") {
  Rng rng(40);
  Matrix x(50, 3);
  for (int r = 0; r < 50; ++r) {
    x(r, 0) = rng.normal();
    x(r, 1) = 7.0;  // constant column
    x(r, 2) = rng.normal();
  }
  const OgkResult ogk = ogk_covariance(x);
  CHECK(ogk.excluded_columns == std::vector<int>{1});
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ogk.cov);
  CHECK(eig.eigenvalues().minCoeff() >= 0.0);

  Matrix all_const = Matrix::Constant(10, 2, 3.0);
  CHECK_THROWS_AS(ogk_covariance(all_const), DegenerateScaleError);
}

TEST_CASE("configuration contracts") {
  Rng rng(44);
  Matrix x(20, 2);
  for (int r = 0; r < 20; ++r) {
    x(r, 0) = rng.normal();
    x(r, 1) = rng.normal();
  }
  OgkConfig bad;
  bad.iterations = 0;
  CHECK_THROWS_AS(ogk_covariance(x, bad), ContractViolation);
  bad = OgkConfig{};
  bad.psd_floor = -1.0;
  CHECK_THROWS_AS(ogk_covariance(x, bad), ContractViolation);
  CHECK_THROWS_AS(ogk_covariance(Matrix::Ones(1, 2)), ContractViolation);
}
