#include <benchmark/benchmark.h>

#include "fnls/measures.hpp"

namespace {

fnls::MeasureConfig defocusing(int n_modes) {
  fnls::MeasureConfig cfg;
  cfg.params.alpha = 0.75;
  cfg.params.gamma = -1;
  cfg.params.n_modes = n_modes;
  return cfg;
}

void BM_sample_gaussian(benchmark::State& state) {
  const fnls::MeasureConfig cfg = defocusing(static_cast<int>(state.range(0)));
  fnls::RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::sample_gaussian(cfg, rng));
  }
}
BENCHMARK(BM_sample_gaussian)->Arg(8)->Arg(64);

void BM_gibbs_log_weight(benchmark::State& state) {
  const fnls::MeasureConfig cfg = defocusing(static_cast<int>(state.range(0)));
  fnls::RngStream rng(1, 0);
  const fnls::SpectralState u = fnls::sample_gaussian(cfg, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::gibbs_log_weight(u, cfg));
  }
}
BENCHMARK(BM_gibbs_log_weight)->Arg(8)->Arg(64);

void BM_rejection_sampling(benchmark::State& state) {
  const fnls::MeasureConfig cfg = defocusing(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::sample_gibbs(cfg, ++seed, 10, 1));
  }
}
BENCHMARK(BM_rejection_sampling)->Arg(4)->Arg(8);

void BM_lambda_k(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fnls::lambda_k(0.75, 0.0, state.range(0)));
  }
}
BENCHMARK(BM_lambda_k)->Arg(10000)->Arg(1000000);

}  // namespace

BENCHMARK_MAIN();
