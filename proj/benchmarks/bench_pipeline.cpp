#include <benchmark/benchmark.h>

#include "synthetic.hpp"
#include "trajzone/forest.hpp"
#include "trajzone/outlier.hpp"
#include "trajzone/statistics.hpp"

using namespace trajzone;

static void BM_Summarize(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = synthetic::unit(rng);
  for (auto _ : state) benchmark::DoNotOptimize(summarize_series(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Summarize)->Arg(100)->Arg(500)->Arg(5000);

static void BM_Vectorize(benchmark::State& state) {
  const auto ds = synthetic::random_dataset(static_cast<std::size_t>(state.range(0)), 2, 100, 500);
  for (auto _ : state) benchmark::DoNotOptimize(vectorize_dataset(ds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Vectorize)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_ScoreAllNodes(benchmark::State& state) {
  const auto vs = vectorize_dataset(synthetic::random_dataset(static_cast<std::size_t>(state.range(0)), 3));
  for (auto _ : state) {
    NodeScorer scorer(vs);
    for (auto node : kTaxonomyNodes) benchmark::DoNotOptimize(scorer.node_scores(node));
  }
}
BENCHMARK(BM_ScoreAllNodes)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_FitForest(benchmark::State& state) {
  const auto set = synthetic::two_zone_speed_set(static_cast<std::size_t>(state.range(0)), 4, 1.0);
  Matrix x(set.vectors.size(), 72);
  std::vector<int> y;
  for (std::size_t r = 0; r < set.vectors.size(); ++r) {
    for (std::size_t c = 0; c < 72; ++c) x(r, c) = set.vectors[r].values[c];
    y.push_back(set.zoned[r].zone == 2);
  }
  ForestConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(x, y, cfg));
}
BENCHMARK(BM_FitForest)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
