#include <benchmark/benchmark.h>

#include "eigenmc/experiment.hpp"
#include "eigenmc/rng.hpp"
#include "eigenmc/simulate.hpp"
#include "eigenmc/stationary.hpp"
#include "eigenmc/transition.hpp"

namespace {

using namespace eigenmc;

SimulationConfig binomial_config(std::int64_t n_paths) {
  SimulationConfig cfg;
  cfg.model = Model::binomial;
  cfg.n_paths = n_paths;
  cfg.master_seed = 1;
  cfg.grid = StateGrid(0.0, 0.1, 21);
  return cfg;
}

SimulationConfig gbm_config(std::int64_t n_paths) {
  SimulationConfig cfg;
  cfg.model = Model::gbm;
  cfg.s0 = 100.0;
  cfg.horizon = 30;
  cfg.n_paths = n_paths;
  cfg.master_seed = 1;
  cfg.grid = StateGrid(80.0, 1.0, 41);
  return cfg;
}

StochasticMatrix run_matrix(const SimulationConfig& cfg) {
  TransitionCounts counts(cfg.grid.size());
  for (std::int64_t k = 0; k < cfg.n_paths; ++k) {
    counts.accumulate_path(simulate_path(cfg, path_seed(cfg.master_seed, k)), cfg.grid);
  }
  return normalize_rows(counts, Repair::restrict_touched);
}

void BM_SimulateBinomialPath(benchmark::State& state) {
  const auto cfg = binomial_config(1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_binomial_path(cfg, seed++));
  }
}
BENCHMARK(BM_SimulateBinomialPath);

void BM_SimulateGbmPath(benchmark::State& state) {
  const auto cfg = gbm_config(1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_gbm_path(cfg, seed++));
  }
}
BENCHMARK(BM_SimulateGbmPath);

// Accumulation throughput: paths simulated and recorded per second.
void BM_Accumulate(benchmark::State& state) {
  const auto cfg = binomial_config(state.range(0));
  for (auto _ : state) {
    TransitionCounts counts(cfg.grid.size());
    for (std::int64_t k = 0; k < cfg.n_paths; ++k) {
      counts.accumulate_path(simulate_path(cfg, path_seed(cfg.master_seed, k)), cfg.grid);
    }
    benchmark::DoNotOptimize(counts.total());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Accumulate)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_StationaryEigen21(benchmark::State& state) {
  const auto m = run_matrix(binomial_config(5000));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_eigen(m));
  }
}
BENCHMARK(BM_StationaryEigen21);

void BM_StationaryPower21(benchmark::State& state) {
  const auto m = run_matrix(binomial_config(5000));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_power(m));
  }
}
BENCHMARK(BM_StationaryPower21);

void BM_StationarySvd41(benchmark::State& state) {
  const auto m = run_matrix(gbm_config(300));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_svd(m));
  }
}
BENCHMARK(BM_StationarySvd41);

void BM_BinomialExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.sim = binomial_config(state.range(0));
  cfg.harness.replications = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_binomial_experiment(cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BinomialExperiment)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
