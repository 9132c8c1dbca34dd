#include <benchmark/benchmark.h>

#include "clthres/forest.hpp"
#include "clthres/synth.hpp"

namespace {

void BM_Sample(benchmark::State& state) {
  const clthres::ForestModel m = clthres::build_star_forest({static_cast<int>(state.range(0)), 10, 0.3});
  clthres::SeededRng rng(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(clthres::sample(m, 10000, rng));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Sample)->Arg(21)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_ForestKl(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  clthres::SeededRng rng(5, 0);
  const clthres::ForestModel p = clthres::build_random_forest(d, d - 1, 3, rng);
  const clthres::ForestModel q = clthres::build_random_forest(d, d / 2, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(clthres::forest_kl(p, q));
}
BENCHMARK(BM_ForestKl)->Arg(20)->Arg(200);

}  // namespace
