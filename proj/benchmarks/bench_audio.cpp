#include <benchmark/benchmark.h>

#include "gazenote/audio.hpp"
#include "gazenote/rng.hpp"

#include <cmath>
#include <vector>

using namespace gazenote;

static void BM_ComputeEnvelope(benchmark::State& state) {
    Rng rng(7);
    std::vector<std::int16_t> samples(static_cast<std::size_t>(state.range(0)));
    for (auto& s : samples)
        s = static_cast<std::int16_t>(rng.normal(0, 4000));
    for (auto _ : state) {
        auto env = compute_envelope(samples, 16000, 10);
        benchmark::DoNotOptimize(env);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeEnvelope)->RangeMultiplier(4)->Range(16000, 16000 << 6);

static void BM_ExtractVoiceNotes(benchmark::State& state) {
    Rng rng(8);
    Envelope env;
    std::int64_t t = 0;
    bool loud = false;
    for (int i = 0; i < state.range(0); ++i) {
        if (rng.bernoulli(0.01)) loud = !loud;
        env.push_back({t, loud ? -30.0 + rng.uniform(-2, 2) : -70.0 + rng.uniform(-2, 2)});
        t += 10;
    }
    const AudioConfig cfg;
    for (auto _ : state) {
        auto notes = extract_voice_notes(env, cfg);
        benchmark::DoNotOptimize(notes);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractVoiceNotes)->RangeMultiplier(4)->Range(4096, 4096 << 6);
