#pragma once

#include "gazenote/audio.hpp"
#include "gazenote/rng.hpp"
#include "gazenote/session.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gazenote {

/// Behavior of one note type. Adherence is the probability that a gaze
/// dwell during the utterance lands on a true target passage.
struct NoteBehavior {
    double adherence = 0.9;
    std::int64_t note_min_ms = 4000;
    std::int64_t note_max_ms = 8000;
};

/// Tunable reading/note-taking behavior. None of these values are claims
/// about human data; they produce plausible desk-scale corpora.
struct BehaviorProfile {
    double mix_short = 0.57;
    double mix_reflective = 0.26;
    double mix_summary = 0.17;
    NoteBehavior short_note{0.9, 4000, 8000};
    NoteBehavior reflective_note{0.3, 8000, 20000};
    NoteBehavior summary_note{0.6, 15000, 40000};
    double fixation_mean_ms = 220;
    double fixation_sd_ms = 60;
    double within_line_saccade_px = 30;     // jitter of the horizontal advance
    double reading_speed_px_per_ms = 0.5;   // horizontal advance rate while reading
    int summary_min_passages = 2;
    int summary_max_passages = 3;
};

BehaviorProfile profile_from_json(const std::string& text);
std::string profile_to_json(const BehaviorProfile& profile);
BehaviorProfile load_profile(const std::filesystem::path& path);

struct SimulatedSession {
    Session session;                        // includes ground truth
    std::vector<VoiceNote> notes;           // injected utterances
    std::map<int, std::string> note_types;  // note_id -> short|reflective|summary
    std::size_t injected_fixations = 0;
};

/// Deterministic synthetic document: 3-4 pages of stacked passages at the
/// usual paragraph scale.
PageLayout make_synthetic_layout(Rng& rng);

/// Generates one participant's reading session: passage-by-passage fixation
/// walks with scrolling, utterances injected per sampled note type, and an
/// envelope that reproduces exactly the injected note boundaries when
/// segmented with the default audio config. Throws LayoutTooSmall (needs
/// >= 2 passages) and requires n_notes >= 1.
SimulatedSession simulate_participant(const PageLayout& layout, const BehaviorProfile& profile,
                                      int n_notes, std::uint64_t seed,
                                      const std::string& participant_id);

/// Writes a simulated session as a standard session directory plus
/// note_types.csv. With emit_wav, a waveform is synthesized instead of the
/// envelope so the audio path is exercised end to end.
void write_simulated_session(const SimulatedSession& sim, const std::filesystem::path& dir,
                             bool emit_wav = false);

/// Per-participant seeds derive from the master seed by counter, so any
/// participant can be regenerated alone and corpora are reproducible under
/// parallel generation. Returns the session directory names.
std::vector<std::string> simulate_corpus(const std::filesystem::path& out_dir, int n_participants,
                                         int notes_per_participant, const BehaviorProfile& profile,
                                         std::uint64_t seed, bool emit_wav = false,
                                         unsigned jobs = 1);

} // namespace gazenote
