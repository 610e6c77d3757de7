#include <benchmark/benchmark.h>

#include "common.hpp"
#include "optomech/spectral.hpp"

using namespace optomech;

static void BM_ProbeResponse(benchmark::State& state) {
  const auto sys = bench::membranes(static_cast<int>(state.range(0)));
  double d = 0.97 * bench::kOmegaM;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral::probe_response(sys, d));
    d += 1.0;
  }
}
BENCHMARK(BM_ProbeResponse)->Arg(1)->Arg(2)->Arg(6)->Arg(32);

static void BM_GroupVelocity(benchmark::State& state) {
  const auto sys = bench::membranes(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::group_velocity(sys, 1.01 * bench::kOmegaM));
}
BENCHMARK(BM_GroupVelocity)->Arg(2)->Arg(6);

static void BM_SweepWithWindows(benchmark::State& state) {
  const auto sys = bench::membranes(4);
  spectral::SweepOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  const auto points = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        spectral::sweep_spectrum(sys, 0.8 * bench::kOmegaM, 1.2 * bench::kOmegaM, points, opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SweepWithWindows)->Args({4001, 1})->Args({4001, 4})->Args({40001, 4})->Unit(benchmark::kMillisecond);
