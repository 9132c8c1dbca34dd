#include <benchmark/benchmark.h>

#include "clthres/estimation.hpp"
#include "clthres/learn.hpp"
#include "clthres/synth.hpp"

namespace {

clthres::SampleMatrix star_samples(int d, int n) {
  const clthres::ForestModel m = clthres::build_star_forest({d, d / 2, 0.3});
  clthres::SeededRng rng(11, 0);
  return clthres::sample(m, n, rng);
}

void BM_AllEmpiricalMi(benchmark::State& state) {
  const clthres::SampleMatrix s = star_samples(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(clthres::all_empirical_mi(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllEmpiricalMi)->ArgsProduct({{25, 50, 100, 200}, {1000, 8000}})->Unit(benchmark::kMillisecond);

void BM_AllEmpiricalMiGeneric(benchmark::State& state) {
  const clthres::SampleMatrix s = star_samples(static_cast<int>(state.range(0)), 4000);
  for (auto _ : state) benchmark::DoNotOptimize(clthres::all_empirical_mi_generic(s));
}
BENCHMARK(BM_AllEmpiricalMiGeneric)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Clthres(benchmark::State& state) {
  const clthres::SampleMatrix s = star_samples(static_cast<int>(state.range(0)), 4000);
  const auto sched = clthres::RegSchedule::power(0.625);
  for (auto _ : state) benchmark::DoNotOptimize(clthres::clthres(s, sched));
}
BENCHMARK(BM_Clthres)->Arg(21)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_Kruskal(benchmark::State& state) {
  const clthres::MiMatrix mi = clthres::all_empirical_mi(star_samples(static_cast<int>(state.range(0)), 500));
  for (auto _ : state) benchmark::DoNotOptimize(clthres::kruskal_mwst(mi));
}
BENCHMARK(BM_Kruskal)->Arg(100)->Arg(400);

}  // namespace
