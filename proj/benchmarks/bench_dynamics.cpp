#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "fnls/dynamics.hpp"
#include "fnls/params.hpp"

namespace {

fnls::SpectralState smooth_state(int n_modes) {
  fnls::SpectralState u(n_modes);
  for (int n = -n_modes; n <= n_modes; ++n) {
    u.at(n) = 0.5 * std::exp(-0.3 * std::abs(n)) *
              std::polar(1.0, 0.7 * n);
  }
  return u;
}

void BM_step_strang(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  fnls::ModelParams p;
  p.n_modes = n;
  const double dt = fnls::default_dt(p);
  fnls::SpectralState u = smooth_state(n);
  for (auto _ : state) {
    u = fnls::step_strang(u, p, dt);
  }
  benchmark::DoNotOptimize(u);
}
BENCHMARK(BM_step_strang)->Arg(8)->Arg(32)->Arg(128)->Arg(256);

void BM_step_rk4(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  fnls::ModelParams p;
  p.n_modes = n;
  const double dt = fnls::default_dt(p);
  fnls::SpectralState u = smooth_state(n);
  for (auto _ : state) {
    u = fnls::step_rk4(u, p, dt);
  }
  benchmark::DoNotOptimize(u);
}
BENCHMARK(BM_step_rk4)->Arg(8)->Arg(32)->Arg(128)->Arg(256);

void BM_evolve_unit_time(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  fnls::ModelParams p;
  p.n_modes = n;
  fnls::IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.record_every = 1 << 30;
  const fnls::SpectralState u = smooth_state(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnls::evolve(u, p, cfg, 1.0));
  }
}
BENCHMARK(BM_evolve_unit_time)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
