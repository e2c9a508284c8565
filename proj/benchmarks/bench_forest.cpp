#include <benchmark/benchmark.h>

#include "gazenote/forest.hpp"
#include "gazenote/rng.hpp"

using namespace gazenote;

namespace {

TrainingSet random_rows(std::size_t n) {
    Rng rng(2);
    TrainingSet data;
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, kFeatureCount> x{};
        for (auto& v : x) v = rng.uniform(0, 1);
        data.x.push_back(x);
        data.y.push_back(x[0] + x[13] > 1.0 ? 1 : 0);
    }
    return data;
}

} // namespace

static void BM_TrainForest(benchmark::State& state) {
    const TrainingSet data = random_rows(static_cast<std::size_t>(state.range(0)));
    ForestConfig cfg;
    cfg.n_trees = 20;
    cfg.seed = 3;
    for (auto _ : state) {
        auto model = train_forest(data, cfg, 1);
        benchmark::DoNotOptimize(model);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.n_trees);
}
BENCHMARK(BM_TrainForest)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

static void BM_PredictProba(benchmark::State& state) {
    const TrainingSet data = random_rows(2000);
    ForestConfig cfg;
    cfg.n_trees = static_cast<int>(state.range(0));
    cfg.seed = 4;
    const TrainedForest model = train_forest(data, cfg, 4);
    Rng rng(5);
    std::array<double, kFeatureCount> x{};
    for (auto& v : x) v = rng.uniform(0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict_proba(model, x));
    }
}
BENCHMARK(BM_PredictProba)->Arg(200)->Arg(1000);
