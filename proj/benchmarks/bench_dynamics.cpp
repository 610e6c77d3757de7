#include <benchmark/benchmark.h>

#include "common.hpp"
#include "optomech/dynamics.hpp"

using namespace optomech;
using namespace optomech::dynamics;

static void BM_HarmonicBalanceRhs(benchmark::State& state) {
  const auto sys = bench::membranes(static_cast<int>(state.range(0)));
  auto p = bench::storage_protocol(bench::storage_system());
  HBState s = HBState::steady(sys);
  s.c_plus = {1e-3, 2e-3};
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_balance_rhs(sys, s, p.t_wr, p));
}
BENCHMARK(BM_HarmonicBalanceRhs)->Arg(2)->Arg(6);

static void BM_MeanFieldRhs(benchmark::State& state) {
  const auto sys = bench::membranes(2);
  const auto s = MeanFieldState::steady(sys);
  const auto drive = DriveSchedule::constant(sys.eps_p(), sys.eps_L());
  for (auto _ : state) benchmark::DoNotOptimize(mean_field_rhs(sys, s, 1e-3, drive, bench::kOmegaM));
}
BENCHMARK(BM_MeanFieldRhs);

static void BM_StorageIntegrate(benchmark::State& state) {
  const auto sys = bench::storage_system();
  const auto p = bench::storage_protocol(sys);
  IntegratorOptions o;
  o.method = state.range(0) == 0 ? Method::adaptive : Method::fixed_rk4;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, p, o));
}
BENCHMARK(BM_StorageIntegrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SteadyStateCrosscheck(benchmark::State& state) {
  const auto sys = bench::membranes(2);
  for (auto _ : state) benchmark::DoNotOptimize(steady_state_crosscheck(sys, bench::kOmegaM));
}
BENCHMARK(BM_SteadyStateCrosscheck)->Unit(benchmark::kMillisecond);
