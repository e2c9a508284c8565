#include <benchmark/benchmark.h>

#include "gazenote/fixations.hpp"
#include "gazenote/rng.hpp"

#include <vector>

using namespace gazenote;

namespace {

std::vector<DocGazeSample> reading_trace(std::size_t n) {
    Rng rng(1);
    std::vector<DocGazeSample> out;
    out.reserve(n);
    std::int64_t t = 0;
    double cx = 100, cy = 100;
    while (out.size() < n) {
        const std::size_t burst = 10 + rng.below(20);
        for (std::size_t i = 0; i < burst && out.size() < n; ++i) {
            out.push_back({t, 1, cx + rng.uniform(-3, 3), cy + rng.uniform(-3, 3), true});
            t += 11;
        }
        cx += 110 + rng.uniform(-20, 20);
        if (cx > 600) {
            cx = 100;
            cy += 26;
        }
        if (cy > 1200) cy = 100;
    }
    return out;
}

} // namespace

static void BM_DetectFixations(benchmark::State& state) {
    const auto trace = reading_trace(static_cast<std::size_t>(state.range(0)));
    const IdtConfig cfg;
    for (auto _ : state) {
        auto fixations = detect_fixations(trace, cfg);
        benchmark::DoNotOptimize(fixations);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectFixations)->RangeMultiplier(4)->Range(1024, 1024 << 6);
