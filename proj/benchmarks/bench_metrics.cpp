#include <benchmark/benchmark.h>

#include "gazenote/metrics.hpp"
#include "gazenote/rng.hpp"

#include <vector>

using namespace gazenote;

static void BM_RocAuc(benchmark::State& state) {
    Rng rng(6);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> scores;
    std::vector<int> truth;
    for (std::size_t i = 0; i < n; ++i) {
        scores.push_back(rng.uniform(0, 1));
        truth.push_back(rng.bernoulli(0.3) ? 1 : 0);
    }
    truth[0] = 0;
    truth[1] = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(roc_auc(scores, truth));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->RangeMultiplier(8)->Range(512, 512 << 9);

BENCHMARK_MAIN();
