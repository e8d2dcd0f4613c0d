#include <benchmark/benchmark.h>

#include "pagecusum/asymptotics.hpp"
#include "pagecusum/datagen.hpp"
#include "pagecusum/detectors.hpp"
#include "pagecusum/wiener.hpp"

using namespace pagecusum;

static void BM_StepDetector(benchmark::State& state) {
  const TrainingSummary training{100, 0.0, 1.0};
  RngStream rng(1, 0);
  std::vector<double> xs(4096);
  for (auto& x : xs) x = rng.gaussian();
  DetectorState st;
  std::size_t i = 0;
  for (auto _ : state) {
    st = step_detector(st, xs[i++ & 4095], training);
    benchmark::DoNotOptimize(detector_stat(st, Side::two_sided, DetectorKind::page));
  }
}
BENCHMARK(BM_StepDetector);

static void BM_FunctionalPath(benchmark::State& state) {
  const FunctionalGrid grid(state.range(0), 0.25);
  RngStream rng(2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(grid.simulate(rng, Side::one_sided));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FunctionalPath)->Arg(1000)->Arg(10000);

static void BM_SolveAm(benchmark::State& state) {
  NormalizationInputs in{1.9, 10000, 1000, 1.0, 1.0, 0.45};
  for (auto _ : state) benchmark::DoNotOptimize(solve_a_m(in).a_m);
}
BENCHMARK(BM_SolveAm);

static void BM_Garch(benchmark::State& state) {
  RngStream rng(3, 0);
  Garch11Process p({0.5, 0.2, 0.3, 0}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(p.next());
}
BENCHMARK(BM_Garch);
BENCHMARK_MAIN();
