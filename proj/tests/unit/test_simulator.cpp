#include "gazenote/audio.hpp"
#include "gazenote/csv.hpp"
#include "gazenote/fixations.hpp"
#include "gazenote/pipeline.hpp"
#include "gazenote/rng.hpp"
#include "gazenote/simulate.hpp"

#include <doctest.h>

#include <filesystem>

using namespace gazenote;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "gazenote_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PageLayout default_layout(std::uint64_t seed = 1) {
    Rng rng(seed);
    return make_synthetic_layout(rng);
}

} // namespace

TEST_SUITE("simulator") {

TEST_CASE("fixed seed reproduces byte-identical session files") {
    const PageLayout layout = default_layout();
    const BehaviorProfile profile;
    const auto a = simulate_participant(layout, profile, 6, 77, "p00");
    const auto b = simulate_participant(layout, profile, 6, 77, "p00");
    const fs::path dir_a = fresh_dir("sim_a");
    const fs::path dir_b = fresh_dir("sim_b");
    write_simulated_session(a, dir_a);
    write_simulated_session(b, dir_b);
    for (const auto& entry : fs::directory_iterator(dir_a))
        CHECK(read_text_file(entry.path()) ==
              read_text_file(dir_b / entry.path().filename()));
}

TEST_CASE("an all-short profile with 0.95 adherence keeps gaze on target") {
    const PageLayout layout = default_layout(3);
    BehaviorProfile profile;
    profile.mix_short = 1.0;
    profile.mix_reflective = 0.0;
    profile.mix_summary = 0.0;
    profile.short_note.adherence = 0.95;
    const auto sim = simulate_participant(layout, profile, 10, 5, "p00");
    const Session& s = sim.session;
    const auto doc_gaze = map_gaze_to_document(s.gaze, s.scrolls, s.viewport);

    for (const auto& note : sim.notes) {
        const auto& truth = s.ground_truth->at(note.note_id);
        REQUIRE(truth.size() == 1);
        const Passage* target = s.layout.find_passage(*truth.begin());
        double in_target_ms = 0, total_ms = 0;
        // fixation time approximated by on-screen sample time at 11 ms per sample
        for (const auto& g : doc_gaze) {
            if (!g.on_screen || g.t_ms < note.start_ms || g.t_ms >= note.end_ms) continue;
            total_ms += 11;
            if (g.page == target->page && target->contains(g.x, g.y)) in_target_ms += 11;
        }
        REQUIRE(total_ms > 0);
        CHECK(in_target_ms / total_ms >= 0.80);
    }
}

TEST_CASE("audio segmentation recovers exactly the injected notes") {
    const PageLayout layout = default_layout(4);
    const BehaviorProfile profile;
    const auto sim = simulate_participant(layout, profile, 22, 9, "p00");
    const auto extracted = extract_voice_notes(*sim.session.audio.envelope, AudioConfig{});
    REQUIRE(extracted.size() == 22);
    for (std::size_t i = 0; i < extracted.size(); ++i) {
        CHECK(extracted[i].start_ms == sim.notes[i].start_ms);
        CHECK(extracted[i].end_ms == sim.notes[i].end_ms);
    }
}

TEST_CASE("summary notes carry >= 2 target passages, others exactly 1") {
    const PageLayout layout = default_layout(5);
    const BehaviorProfile profile;
    const auto sim = simulate_participant(layout, profile, 30, 11, "p00");
    for (const auto& [note_id, type] : sim.note_types) {
        const auto& truth = sim.session.ground_truth->at(note_id);
        if (type == "summary")
            CHECK(truth.size() >= 2);
        else
            CHECK(truth.size() == 1);
    }
}

TEST_CASE("generated sessions pass session-io validation end to end") {
    const fs::path dir = fresh_dir("sim_corpus");
    simulate_corpus(dir, 3, 5, BehaviorProfile{}, 123);
    for (const auto& session_dir : corpus_session_dirs(dir)) {
        const Session s = load_session(session_dir);
        CHECK(s.viewport.width > 0);
        CHECK(!s.gaze.empty());
        CHECK(s.ground_truth.has_value());
        // non-fatal checks stay quiet on simulated data
        CHECK(validate_session(s).empty());
    }
}

TEST_CASE("regenerating one participant alone matches its corpus copy") {
    const fs::path dir = fresh_dir("sim_corpus_regen");
    const std::uint64_t master = 2026;
    simulate_corpus(dir, 6, 4, BehaviorProfile{}, master);

    // participant 5 regenerated in isolation, as simulate_corpus derives it
    const std::uint64_t participant_seed = derive_seed(master, 5);
    Rng layout_rng(derive_seed(participant_seed, 0));
    const PageLayout layout = make_synthetic_layout(layout_rng);
    const auto sim =
        simulate_participant(layout, BehaviorProfile{}, 4, derive_seed(participant_seed, 1),
                             "p05");
    const fs::path lone = fresh_dir("sim_lone");
    write_simulated_session(sim, lone);
    for (const auto& entry : fs::directory_iterator(lone))
        CHECK(read_text_file(entry.path()) ==
              read_text_file(dir / "p05" / entry.path().filename()));
}

TEST_CASE("detection recovers at least 90% of injected fixations") {
    const PageLayout layout = default_layout(6);
    const BehaviorProfile profile;
    const auto sim = simulate_participant(layout, profile, 12, 31, "p00");
    const Session& s = sim.session;
    const auto clean =
        remove_outliers(map_gaze_to_document(s.gaze, s.scrolls, s.viewport));
    const auto detected = detect_fixations(clean, IdtConfig{});
    CHECK(detected.size() >=
          static_cast<std::size_t>(0.90 * static_cast<double>(sim.injected_fixations)));
}

TEST_CASE("the emit-wav flag produces a loadable PCM session") {
    const fs::path dir = fresh_dir("sim_wav");
    const PageLayout layout = default_layout(7);
    const auto sim = simulate_participant(layout, BehaviorProfile{}, 4, 55, "p00");
    write_simulated_session(sim, dir, /*emit_wav=*/true);
    CHECK(fs::exists(dir / "audio.wav"));
    CHECK_FALSE(fs::exists(dir / "envelope.csv"));
    const Session s = load_session(dir);
    REQUIRE(s.audio.pcm.has_value());
    // the synthesized waveform segments back into the same number of notes
    const auto env = compute_envelope(s.audio.pcm->samples, s.audio.pcm->sample_rate, 10);
    const auto extracted = extract_voice_notes(env, AudioConfig{});
    CHECK(extracted.size() == sim.notes.size());
}

TEST_CASE("layouts too small to read are rejected") {
    PageLayout tiny;
    Page page;
    page.page = 1;
    page.w = 400;
    page.h = 400;
    Passage p;
    p.id = 0;
    p.page = 1;
    p.x = 10;
    p.y = 10;
    p.w = 100;
    p.h = 50;
    page.passages.push_back(p);
    tiny.pages.push_back(page);
    CHECK_THROWS_AS(simulate_participant(tiny, BehaviorProfile{}, 3, 1, "p00"),
                    LayoutTooSmall);
}

TEST_CASE("profile JSON round-trips and validates its mix") {
    BehaviorProfile p;
    p.mix_short = 0.5;
    p.mix_reflective = 0.3;
    p.mix_summary = 0.2;
    p.short_note.adherence = 0.8;
    const BehaviorProfile back = profile_from_json(profile_to_json(p));
    CHECK(back.mix_short == p.mix_short);
    CHECK(back.short_note.adherence == 0.8);
    CHECK_THROWS_AS(profile_from_json(R"({"mix": {"short": 0.9, "reflective": 0.9,
                                        "summary": 0.9}})"),
                    ValidationError);
}

} // TEST_SUITE
