#pragma once

#include "gazenote/session.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gazenote {

/// One detected utterance. Notes are disjoint, sorted, and numbered 0..n-1
/// in time order.
struct VoiceNote {
    int note_id = 0;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

/// Analysis window of a note: from the end of the previous note (or the
/// session start for the first note) to the end of this note.
struct RegionOfAnalysis {
    int note_id = 0;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

struct AudioConfig {
    double threshold_db_rel = 26.0;     // dB above the session noise floor
    std::int64_t min_note_ms = 3000;    // shorter segments are discarded
    std::int64_t merge_gap_ms = 400;    // gaps under this merge adjacent runs
    std::int64_t frame_ms = 10;         // envelope frame, non-overlapping
};

/// RMS loudness per non-overlapping frame, in dBFS (full scale = 32768),
/// floored at -120 dB for silent frames. Throws EmptyAudio on empty input.
Envelope compute_envelope(std::span<const std::int16_t> samples, int sample_rate,
                          std::int64_t frame_ms);

/// Session noise floor: 5th percentile of envelope levels (lower nearest rank).
double noise_floor_db(const Envelope& env);

/// Thresholds the envelope at noise_floor + cfg.threshold_db_rel, merges
/// above-threshold runs separated by silences shorter than cfg.merge_gap_ms,
/// then keeps runs of at least cfg.min_note_ms. Empty result is valid.
std::vector<VoiceNote> extract_voice_notes(const Envelope& env, const AudioConfig& cfg);

/// One ROA per note; consecutive ROAs share endpoints and tile
/// [session_start, last note end].
std::vector<RegionOfAnalysis> compute_roas(std::span<const VoiceNote> notes,
                                           std::int64_t session_start_ms);

/// Minimal RIFF/WAVE reader; accepts 16-bit PCM mono only.
PcmAudio read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const PcmAudio& audio);

void write_notes_csv(const std::filesystem::path& path, std::span<const VoiceNote> notes);

} // namespace gazenote
