#include <benchmark/benchmark.h>

#include <cmath>

#include "rrmc/heat_adjoint.hpp"
#include "rrmc/heat_forward.hpp"

namespace {

using namespace rrmc;

SimConfig bench_config(benchmark::State& state) {
  SimConfig cfg = SimConfig::desk();
  cfg.particles = static_cast<std::size_t>(state.range(0));
  return cfg;
}

Control bench_control(std::size_t cells) {
  Control u = Control::zeros(cells);
  for (std::size_t n = 0; n < cells; ++n) u.rates[n] = 0.5 + 0.3 * std::sin(0.1 * static_cast<double>(n));
  return u;
}

void BM_Forward(benchmark::State& state) {
  const auto cfg = bench_config(state);
  const auto u = bench_control(cfg.cells());
  for (auto _ : state) benchmark::DoNotOptimize(run_forward(cfg, u).objective);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.particles * cfg.steps));
}
BENCHMARK(BM_Forward)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state, GradientMode mode) {
  const auto cfg = bench_config(state);
  const auto u = bench_control(cfg.cells());
  for (auto _ : state) benchmark::DoNotOptimize(compute_gradient(cfg, u, mode).objective);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.particles * cfg.steps));
}
BENCHMARK_CAPTURE(BM_Gradient, stored, GradientMode::Stored)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gradient, reversible, GradientMode::Reversible)
    ->Arg(1000)
    ->Arg(10000)
    ->Unit(benchmark::kMillisecond);

}  // namespace
