#include "gazenote/audio.hpp"
#include "gazenote/errors.hpp"
#include "gazenote/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace gazenote;

namespace {

Envelope binary_envelope(const std::vector<std::pair<std::int64_t, std::int64_t>>& loud_runs,
                         std::int64_t end_ms, double low_db, double high_db,
                         std::int64_t dt = 10) {
    Envelope env;
    for (std::int64_t t = 0; t < end_ms; t += dt) {
        bool loud = false;
        for (const auto& [a, b] : loud_runs)
            if (t >= a && t < b) loud = true;
        env.push_back({t, loud ? high_db : low_db});
    }
    return env;
}

// linear scan over the envelope: mark loud points, stitch runs by walking
// forward with an explicit gap counter, then filter by duration
std::vector<std::pair<std::int64_t, std::int64_t>> brute_force_notes(const Envelope& env,
                                                                     double threshold,
                                                                     std::int64_t dt,
                                                                     std::int64_t merge_gap,
                                                                     std::int64_t min_dur) {
    std::vector<std::pair<std::int64_t, std::int64_t>> notes;
    std::int64_t run_start = -1, run_end = -1;
    for (const auto& p : env) {
        if (p.db < threshold) continue;
        if (run_start < 0) {
            run_start = p.t_ms;
        } else if (p.t_ms - run_end >= merge_gap) {
            notes.emplace_back(run_start, run_end);
            run_start = p.t_ms;
        }
        run_end = p.t_ms + dt;
    }
    if (run_start >= 0) notes.emplace_back(run_start, run_end);
    std::vector<std::pair<std::int64_t, std::int64_t>> kept;
    for (const auto& n : notes)
        if (n.second - n.first >= min_dur) kept.push_back(n);
    return kept;
}

} // namespace

TEST_SUITE("audio-notes") {

TEST_CASE("envelope of silence sits on the -120 dB floor") {
    std::vector<std::int16_t> samples(1600, 0);
    const Envelope env = compute_envelope(samples, 16000, 10);
    REQUIRE(env.size() == 10);
    for (const auto& p : env) CHECK(p.db == doctest::Approx(-120.0));
    CHECK(env[3].t_ms == 30);
}

TEST_CASE("full-scale square wave sits at 0 dBFS") {
    std::vector<std::int16_t> samples;
    for (int i = 0; i < 160; ++i)
        samples.push_back(i % 2 == 0 ? static_cast<std::int16_t>(-32768)
                                     : static_cast<std::int16_t>(32767));
    const Envelope env = compute_envelope(samples, 16000, 10);
    REQUIRE(env.size() == 1);
    CHECK(env[0].db == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("half-scale sine is about -9.03 dBFS") {
    std::vector<std::int16_t> samples;
    for (int i = 0; i < 160; ++i)
        samples.push_back(static_cast<std::int16_t>(
            std::lround(16384.0 * std::sin(2.0 * 3.14159265358979 * i / 16.0))));
    const Envelope env = compute_envelope(samples, 16000, 10);
    // hand oracle: 20*log10(0.5 / sqrt(2)) = -9.0309
    CHECK(env[0].db == doctest::Approx(20.0 * std::log10(0.5 / std::sqrt(2.0))).epsilon(1e-3));
}

TEST_CASE("empty audio raises EmptyAudio") {
    CHECK_THROWS_AS(compute_envelope({}, 16000, 10), EmptyAudio);
}

TEST_CASE("envelope entirely below threshold yields no notes") {
    const Envelope env = binary_envelope({}, 5000, -70, -30);
    CHECK(extract_voice_notes(env, AudioConfig{}).empty());
}

TEST_CASE("a 2500 ms run is discarded by the 3 s minimum") {
    const Envelope env = binary_envelope({{1000, 3500}}, 6000, -70, -30);
    AudioConfig cfg;
    cfg.min_note_ms = 3000;
    CHECK(extract_voice_notes(env, cfg).empty());

    // the same run passes once the minimum is met
    const Envelope env2 = binary_envelope({{1000, 4000}}, 6000, -70, -30);
    CHECK(extract_voice_notes(env2, cfg).size() == 1);
}

TEST_CASE("two runs separated by 1500 ms stay separate notes") {
    const Envelope env = binary_envelope({{1000, 5000}, {6500, 11500}}, 13000, -70, -30);
    const auto notes = extract_voice_notes(env, AudioConfig{});
    REQUIRE(notes.size() == 2);
    CHECK(notes[0].note_id == 0);
    CHECK(notes[0].start_ms == 1000);
    CHECK(notes[0].end_ms == 5000);
    CHECK(notes[1].note_id == 1);
    CHECK(notes[1].start_ms == 6500);
    CHECK(notes[1].end_ms == 11500);
}

TEST_CASE("runs separated by less than the merge gap fuse into one note") {
    // 300 ms pause between words must not split the note
    const Envelope env = binary_envelope({{1000, 3000}, {3300, 6000}}, 8000, -70, -30);
    const auto notes = extract_voice_notes(env, AudioConfig{});
    REQUIRE(notes.size() == 1);
    CHECK(notes[0].start_ms == 1000);
    CHECK(notes[0].end_ms == 6000);
}

TEST_CASE("extraction matches a brute-force linear scan on random envelopes") {
    Rng rng(42);
    AudioConfig cfg;
    for (int trial = 0; trial < 200; ++trial) {
        Envelope env;
        std::int64_t t = 0;
        for (int i = 0; i < 400; ++i) {
            env.push_back({t, rng.bernoulli(0.35) ? -30.0 + rng.uniform(-2, 2)
                                                  : -70.0 + rng.uniform(-2, 2)});
            t += 10;
        }
        const double threshold = noise_floor_db(env) + cfg.threshold_db_rel;
        const auto expected =
            brute_force_notes(env, threshold, 10, cfg.merge_gap_ms, cfg.min_note_ms);
        const auto actual = extract_voice_notes(env, cfg);
        REQUIRE(actual.size() == expected.size());
        for (std::size_t i = 0; i < actual.size(); ++i) {
            CHECK(actual[i].start_ms == expected[i].first);
            CHECK(actual[i].end_ms == expected[i].second);
        }
    }
}

TEST_CASE("re-thresholding an already-binary envelope is idempotent") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::int64_t, std::int64_t>> runs;
        std::int64_t t = 1000;
        while (t < 50000) {
            const std::int64_t dur = 3000 + static_cast<std::int64_t>(rng.below(5000)) / 10 * 10;
            runs.emplace_back(t, t + dur);
            t += dur + 500 + static_cast<std::int64_t>(rng.below(3000)) / 10 * 10;
        }
        const Envelope env = binary_envelope(runs, t + 1000, -70, -30);
        const auto notes1 = extract_voice_notes(env, AudioConfig{});
        // rebuild a binary envelope from the extracted notes and re-extract
        std::vector<std::pair<std::int64_t, std::int64_t>> note_runs;
        for (const auto& n : notes1) note_runs.emplace_back(n.start_ms, n.end_ms);
        const Envelope env2 = binary_envelope(note_runs, t + 1000, -70, -30);
        const auto notes2 = extract_voice_notes(env2, AudioConfig{});
        REQUIRE(notes1.size() == notes2.size());
        for (std::size_t i = 0; i < notes1.size(); ++i) {
            CHECK(notes1[i].start_ms == notes2[i].start_ms);
            CHECK(notes1[i].end_ms == notes2[i].end_ms);
        }
    }
}

TEST_CASE("single note ROA starts at the session start") {
    const std::vector<VoiceNote> notes{{0, 4000, 9000}};
    const auto roas = compute_roas(notes, 0);
    REQUIRE(roas.size() == 1);
    CHECK(roas[0].start_ms == 0);
    CHECK(roas[0].end_ms == 9000);
}

TEST_CASE("later ROAs run between consecutive note ends") {
    const std::vector<VoiceNote> notes{{0, 4000, 10000}, {1, 20000, 25000}};
    const auto roas = compute_roas(notes, 0);
    REQUIRE(roas.size() == 2);
    CHECK(roas[1].start_ms == 10000);
    CHECK(roas[1].end_ms == 25000);
}

TEST_CASE("no notes yield no ROAs") { CHECK(compute_roas({}, 0).empty()); }

TEST_CASE("ROAs tile the session and contain their notes") {
    Rng rng(99);
    std::vector<VoiceNote> notes;
    std::int64_t t = 2000;
    for (int i = 0; i < 12; ++i) {
        const std::int64_t start = t + static_cast<std::int64_t>(rng.below(4000));
        const std::int64_t end = start + 3000 + static_cast<std::int64_t>(rng.below(6000));
        notes.push_back({i, start, end});
        t = end + 500;
    }
    const auto roas = compute_roas(notes, 0);
    REQUIRE(roas.size() == notes.size());
    CHECK(roas.front().start_ms == 0);
    CHECK(roas.back().end_ms == notes.back().end_ms);
    for (std::size_t i = 0; i < roas.size(); ++i) {
        CHECK(roas[i].start_ms < roas[i].end_ms);
        CHECK(notes[i].start_ms >= roas[i].start_ms);
        CHECK(notes[i].end_ms == roas[i].end_ms);
        if (i > 0) CHECK(roas[i].start_ms == roas[i - 1].end_ms);
    }
}

TEST_CASE("wav files round-trip 16-bit PCM exactly") {
    const auto dir = std::filesystem::temp_directory_path() / "gazenote_tests";
    std::filesystem::create_directories(dir);
    PcmAudio audio;
    audio.sample_rate = 8000;
    Rng rng(5);
    for (int i = 0; i < 4000; ++i)
        audio.samples.push_back(static_cast<std::int16_t>(rng.below(65536) - 32768));
    const auto path = dir / "roundtrip.wav";
    write_wav(path, audio);
    const PcmAudio back = read_wav(path);
    CHECK(back.sample_rate == audio.sample_rate);
    CHECK(back.samples == audio.samples);
}

} // TEST_SUITE
