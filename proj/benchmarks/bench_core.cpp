#include <benchmark/benchmark.h>

#include "recipe_rl/recipe_rl.hpp"

namespace {

using namespace recipe_rl;

const ObjectiveSpec kFadedTarget{{0.8, 16.0, 21.0, 71.0}};

void BM_EncodeDecodeState(benchmark::State& state) {
  const auto grid = defaultOzoneGrid();
  StateIndex i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid.encodeState(grid.decodeState(i)));
    i = (i + 7919) % grid.stateCount();
  }
}
BENCHMARK(BM_EncodeDecodeState);

void BM_SurrogateEvaluate(benchmark::State& state) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto s = grid.decodeState(23970);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(model, kFadedTarget, grid, s));
}
BENCHMARK(BM_SurrogateEvaluate);

void BM_EnvStep(benchmark::State& state) {
  Environment env(defaultOzoneGrid(), makeReferenceSurrogate(), kFadedTarget,
                  state.range(0) != 0);
  Rng rng(1);
  auto s = env.randomInitialState(rng);
  const auto& grid = env.grid();
  for (auto _ : state) {
    auto out = env.step(s, grid.decodeAction(rng.below(grid.actionCount())));
    s = std::move(out.nextState);
  }
}
BENCHMARK(BM_EnvStep)->Arg(0)->Arg(1)->ArgName("memo");

void BM_BruteForce(benchmark::State& state) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bruteForce(grid, model, kFadedTarget, static_cast<unsigned>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.stateCount()));
}
BENCHMARK(BM_BruteForce)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TrainDefaultHyperparameters(benchmark::State& state) {
  Hyperparameters hp;
  for (auto _ : state) {
    Environment env(defaultOzoneGrid(), makeReferenceSurrogate(), kFadedTarget);
    benchmark::DoNotOptimize(train(env, hp));
  }
  state.SetItemsProcessed(state.iterations() * hp.episodes * hp.stepsPerEpisode);
}
BENCHMARK(BM_TrainDefaultHyperparameters)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
