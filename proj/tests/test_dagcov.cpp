#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "pcdag/dagcov.hpp"
#include "pcdag/eval.hpp"
#include "pcdag/pcalg.hpp"
#include "pcdag/simgen.hpp"
#include "support/oracles.hpp"

using namespace pcdag;
namespace oracle = pcdag::testing;

TEST_CASE("sample covariance basics") {
  Matrix one_row(1, 3);
  one_row << 4.0, -1.0, 2.5;
  Dataset d;
  d.x = one_row;
  CHECK(sample_covariance(d).cwiseAbs().maxCoeff() == 0.0);

  Matrix two(2, 2);
  two << 1.0, 0.0, -1.0, 0.0;
  d.x = two;
  Matrix expect(2, 2);
  expect << 1.0, 0.0, 0.0, 0.0;
  CHECK((sample_covariance(d) - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("sample covariance is symmetric positive semidefinite") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(rng.uniform_int(2, 30), rng.uniform_int(1, 8));
    for (int r = 0; r < x.rows(); ++r) {
      for (int c = 0; c < x.cols(); ++c) x(r, c) = rng.normal() * rng.uniform(0.5, 3.0);
    }
    const Matrix s = sample_covariance(x);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()));
  }
}

TEST_CASE("parent regression closed forms") {
  SUBCASE("no parents") {
    const Matrix s = Matrix::Identity(3, 3) * 2.5;
    const Regression reg = regress_on_parents(s, 1, {});
    CHECK(reg.beta.size() == 0);
    CHECK(reg.variance == doctest::Approx(2.5));
  }
  SUBCASE("single parent") {
    Matrix s(2, 2);
    s << 1.0, 0.5, 0.5, 1.0;
    const Regression reg = regress_on_parents(s, 0, {1});
    CHECK(reg.beta(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(reg.variance == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("diagonal covariance gives zero coefficients") {
    Matrix s = Matrix::Identity(4, 4);
    s.diagonal() << 1.0, 2.0, 3.0, 4.0;
    const Regression reg = regress_on_parents(s, 2, {0, 1, 3});
    CHECK(reg.beta.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(reg.variance == doctest::Approx(3.0));
  }
  SUBCASE("contracts") {
    const Matrix s = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(regress_on_parents(s, 0, {0}), ContractViolation);
    CHECK_THROWS_AS(regress_on_parents(s, 5, {}), ContractViolation);
  }
  SUBCASE("singular parent block falls back to the pseudo inverse") {
    Matrix s(3, 3);
    s << 1.0, 0.9, 0.9, 0.9, 1.0, 1.0, 0.9, 1.0, 1.0;  // parents 1 and 2 identical
    const Regression reg = regress_on_parents(s, 0, {1, 2});
    CHECK(reg.used_pseudo_inverse);
    CHECK(reg.variance > 0.0);
  }
}

TEST_CASE("regression system of simple DAGs") {
  SUBCASE("empty DAG") {
    const Matrix s = (Vector(2) << 2.0, 3.0).finished().asDiagonal();
    const Dag empty{PartiallyDirectedGraph(2)};
    const DagLinearSystem sys = dag_linear_system(s, empty);
    CHECK((sys.a - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sys.d(0) == doctest::Approx(2.0));
    CHECK(sys.d(1) == doctest::Approx(3.0));
  }
  SUBCASE("two-node chain") {
    Matrix s(2, 2);
    s << 1.0, 0.5, 0.5, 1.0;
    PartiallyDirectedGraph g(2);
    g.add_directed(0, 1);
    const DagLinearSystem sys = dag_linear_system(s, Dag(g));
    CHECK(sys.a(0, 0) == 1.0);
    CHECK(sys.a(1, 1) == 1.0);
    CHECK(sys.a(1, 0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(sys.a(0, 1) == 0.0);
    CHECK(sys.d(0) == doctest::Approx(1.0));
    CHECK(sys.d(1) == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("true covariance of a simulated model reproduces its weights") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const DagModel model = sample_dag_model(rng.uniform_int(3, 12), 0.3, rng);
    const DagLinearSystem sys = dag_linear_system(model.sigma_true, model.dag);
    const Matrix expect_a = Matrix::Identity(model.b.rows(), model.b.cols()) - model.b;
    CHECK((sys.a - expect_a).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((sys.d - Vector::Ones(model.b.rows())).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("factorization of the identity system") {
  DagLinearSystem sys;
  sys.a = Matrix::Identity(3, 3);
  sys.d = Vector::Ones(3);
  sys.topological_order = {0, 1, 2};
  const CovariancePair pair = dag_covariance(sys);
  CHECK((pair.sigma - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pair.omega - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-node factorization round trip") {
  Matrix s(2, 2);
  s << 1.0, 0.5, 0.5, 1.0;
  PartiallyDirectedGraph g(2);
  g.add_directed(0, 1);
  const CovariancePair pair = dag_covariance(dag_linear_system(s, Dag(g)));
  CHECK((pair.sigma - s).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pair.omega * pair.sigma - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("nonpositive conditional variance is rejected") {
  DagLinearSystem sys;
  sys.a = Matrix::Identity(2, 2);
  sys.d = (Vector(2) << 1.0, 0.0).finished();
  sys.topological_order = {0, 1};
  CHECK_THROWS_AS(dag_covariance(sys), NumericalError);
}

TEST_CASE("round trip through the factorization is exact on random models") {
  Rng rng(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = rng.uniform_int(2, 40);
    const double s = rng.uniform(0.02, 0.12);
    const DagModel model = sample_dag_model(p, s, rng);
    const CovariancePair pair = dag_covariance(dag_linear_system(model.sigma_true, model.dag));
    const double scale = model.sigma_true.cwiseAbs().maxCoeff();
    CHECK((pair.sigma - model.sigma_true).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    const double omega_scale = model.omega_true.cwiseAbs().maxCoeff();
    CHECK((pair.omega - model.omega_true).cwiseAbs().maxCoeff() <= 1e-10 * omega_scale);
  }
}

TEST_CASE("precision support is contained in the moral graph") {
  Rng rng(88);
  for (int trial = 0; trial < 15; ++trial) {
    const int p = rng.uniform_int(4, 15);
    const Dag d = oracle::random_dag(p, 0.25, rng);
    // random positive definite initial covariance
    Matrix x(40 + p, p);
    for (int r = 0; r < x.rows(); ++r) {
      for (int c = 0; c < p; ++c) x(r, c) = rng.normal();
    }
    const Matrix s = sample_covariance(x) + 0.5 * Matrix::Identity(p, p);
    const CovariancePair pair = dag_covariance(dag_linear_system(s, d));
    const auto moral = oracle::moral_adjacency(d);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        if (i != j && !moral[i][j]) CHECK(pair.omega(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("every class member leaves the same structural support") {
  Rng rng(999);
  int tested = 0;
  while (tested < 20) {
    const int p = rng.uniform_int(4, 12);
    const Dag d = oracle::random_dag(p, 0.3, rng);
    const Cpdag c = cpdag_of(d);
    REQUIRE(c.valid());
    Rng first_rng = rng.stream(static_cast<std::uint64_t>(2 * tested));
    Rng second_rng = rng.stream(static_cast<std::uint64_t>(2 * tested + 1));
    const Dag first = extend_to_dag(c, first_rng);
    const Dag second = extend_to_dag(c, second_rng);
    CHECK(oracle::moral_adjacency(first) == oracle::moral_adjacency(second));
    ++tested;
  }
}

TEST_CASE("single-DAG estimate pairs omega with sigma") {
  Rng rng(414);
  const DagModel model = sample_dag_model(12, 0.1, rng);
  Rng data_rng(415);
  const Dataset data = sample_data(model, 80, ErrorDistribution{}, data_rng);
  PcDagOptions opts;
  opts.alpha = 0.05;
  opts.n_dags = 1;
  opts.seed = 7;
  const EstimationResult res = pc_dag_estimate(data, opts);
  CHECK((res.omega * res.sigma - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-8);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(res.sigma);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("vanishing alpha produces the diagonal estimate") {
  Rng rng(21);
  const DagModel model = sample_dag_model(6, 0.2, rng);
  Rng data_rng(22);
  const Dataset data = sample_data(model, 50, ErrorDistribution{}, data_rng);
  PcDagOptions opts;
  opts.alpha = 1e-12;
  opts.seed = 1;
  const EstimationResult res = pc_dag_estimate(data, opts);
  const Matrix s = sample_covariance(data);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j) {
        CHECK(res.sigma(i, i) == doctest::Approx(s(i, i)).epsilon(1e-12));
        CHECK(res.omega(i, i) == doctest::Approx(1.0 / s(i, i)).epsilon(1e-12));
      } else {
        CHECK(res.sigma(i, j) == 0.0);
        CHECK(res.omega(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("fully directed class makes averaging irrelevant") {
  // strong v-structure 0 -> 2 <- 1: the estimated CPDAG is fully directed
  Rng rng(31);
  Matrix x(5000, 3);
  for (int r = 0; r < x.rows(); ++r) {
    x(r, 0) = rng.normal();
    x(r, 1) = rng.normal();
    x(r, 2) = 0.9 * x(r, 0) + 0.9 * x(r, 1) + rng.normal();
  }
  Dataset data;
  data.x = x;
  PcDagOptions one;
  one.alpha = 0.01;
  one.n_dags = 1;
  one.seed = 5;
  PcDagOptions five = one;
  five.n_dags = 5;
  const EstimationResult res1 = pc_dag_estimate(data, one);
  const EstimationResult res5 = pc_dag_estimate(data, five);
  REQUIRE(res1.cpdag.has_value());
  CHECK(res1.cpdag->graph().fully_directed());
  CHECK((res1.sigma - res5.sigma).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((res1.omega - res5.omega).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("averaged estimates report the inverse-pair deviation") {
  Rng rng(61);
  const DagModel model = sample_dag_model(10, 0.15, rng);
  Rng data_rng(62);
  const Dataset data = sample_data(model, 60, ErrorDistribution{}, data_rng);
  PcDagOptions opts;
  opts.alpha = 0.1;
  opts.n_dags = 10;
  opts.seed = 3;
  const EstimationResult res = pc_dag_estimate(data, opts);
  CHECK(res.diagnostics.count("inverse_pair_deviation") == 1);
  CHECK(res.diagnostics.count("omega_nonzeros") == 1);
  CHECK(res.diagnostics.at("dags_averaged") == doctest::Approx(10.0));
  // averaged sigma stays positive semidefinite
  Eigen::SelfAdjointEigenSolver<Matrix> eig(res.sigma);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("estimation result serializes to JSON") {
  Rng rng(91);
  const DagModel model = sample_dag_model(5, 0.2, rng);
  Rng data_rng(92);
  const Dataset data = sample_data(model, 30, ErrorDistribution{}, data_rng);
  PcDagOptions opts;
  opts.alpha = 0.05;
  opts.seed = 11;
  const EstimationResult res = pc_dag_estimate(data, opts);
  const auto j = nlohmann::json::parse(estimation_result_to_json(res));
  CHECK(j["p"] == 5);
  CHECK(j["sigma"].size() == 25);
  CHECK(j["omega"].size() == 25);
  CHECK(j["tuning"] == doctest::Approx(0.05));
  CHECK(j["diagnostics"].contains("ci_tests"));
  CHECK(j["graph"].contains("p"));
}
