#include <benchmark/benchmark.h>

#include "fnls/fourier.hpp"
#include "fnls/rng.hpp"
#include "fnls/spectral.hpp"

namespace {

fnls::SpectralState random_state(int n_modes) {
  fnls::RngStream rng(1, 0);
  fnls::SpectralState u(n_modes);
  for (int n = -n_modes; n <= n_modes; ++n) {
    u.at(n) = fnls::cplx(rng.next_gaussian(), rng.next_gaussian());
  }
  return u;
}

void BM_to_grid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fnls::SpectralState u = random_state(n);
  const int m = fnls::dealias_grid_size(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::to_grid(u, m));
  }
}
BENCHMARK(BM_to_grid)->Arg(8)->Arg(32)->Arg(128)->Arg(256);

void BM_grid_roundtrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fnls::SpectralState u = random_state(n);
  const int m = fnls::dealias_grid_size(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::from_grid(fnls::to_grid(u, m), n));
  }
}
BENCHMARK(BM_grid_roundtrip)->Arg(8)->Arg(64)->Arg(256);

void BM_quartic_integral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fnls::SpectralState u = random_state(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::quartic_integral(u));
  }
}
BENCHMARK(BM_quartic_integral)->Arg(8)->Arg(32)->Arg(128);

void BM_sobolev_norm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fnls::SpectralState u = random_state(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::sobolev_norm(u, 0.35));
  }
}
BENCHMARK(BM_sobolev_norm)->Arg(32)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
