#include <benchmark/benchmark.h>

#include "pcdag/dagcov.hpp"
#include "pcdag/glasso.hpp"
#include "pcdag/pcalg.hpp"
#include "pcdag/robust.hpp"
#include "pcdag/simgen.hpp"

namespace {

pcdag::Dataset benchmark_data(int p, int n, double s, std::uint64_t seed) {
  pcdag::Rng rng(seed);
  const pcdag::DagModel model = pcdag::sample_dag_model(p, s, rng);
  pcdag::Rng data_rng = rng.stream(1);
  return pcdag::sample_data(model, n, pcdag::ErrorDistribution{}, data_rng);
}

void BM_pc_cpdag(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const pcdag::Dataset data = benchmark_data(p, 50, 0.01, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcdag::pc_cpdag(data, 0.01));
  }
}
BENCHMARK(BM_pc_cpdag)->Arg(40)->Arg(80)->Arg(120);

void BM_pc_dag_estimate(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const pcdag::Dataset data = benchmark_data(p, 50, 0.01, 11);
  pcdag::PcDagOptions opts;
  opts.alpha = 0.01;
  opts.n_dags = 10;
  opts.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcdag::pc_dag_estimate(data, opts));
  }
}
BENCHMARK(BM_pc_dag_estimate)->Arg(40)->Arg(80);

void BM_glasso_fit(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const pcdag::Dataset data = benchmark_data(p, 50, 0.01, 13);
  const pcdag::Matrix s = pcdag::sample_covariance(data);
  pcdag::GlassoConfig cfg;
  cfg.lambda = 0.2 * pcdag::glasso_lambda_max(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcdag::glasso_fit(s, cfg));
  }
}
BENCHMARK(BM_glasso_fit)->Arg(40)->Arg(80);

void BM_ogk_covariance(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const pcdag::Dataset data = benchmark_data(p, 50, 0.01, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcdag::ogk_covariance(data));
  }
}
BENCHMARK(BM_ogk_covariance)->Arg(40)->Arg(80);

void BM_dag_covariance(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  pcdag::Rng rng(19);
  const pcdag::DagModel model = pcdag::sample_dag_model(p, 0.05, rng);
  const pcdag::DagLinearSystem sys = pcdag::dag_linear_system(model.sigma_true, model.dag);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcdag::dag_covariance(sys));
  }
}
BENCHMARK(BM_dag_covariance)->Arg(40)->Arg(120);

}  // namespace

BENCHMARK_MAIN();
