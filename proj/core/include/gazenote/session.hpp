#pragma once

#include "gazenote/layout.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gazenote {

struct EnvelopePoint {
    std::int64_t t_ms = 0;
    double db = 0;      // dBFS
};
using Envelope = std::vector<EnvelopePoint>;

struct PcmAudio {
    int sample_rate = 0;
    std::vector<std::int16_t> samples;  // mono
};

/// Audio stream of a session: a precomputed loudness envelope
/// (envelope.csv) or raw mono PCM (audio.wav). Exactly one is set.
struct SessionAudio {
    std::optional<Envelope> envelope;
    std::optional<PcmAudio> pcm;
};

/// One recorded reading session, immutable after loading and safe to share
/// across threads.
struct Session {
    std::string participant_id;
    std::vector<GazeSample> gaze;       // sorted by t (duplicates kept in order)
    std::vector<ScrollEvent> scrolls;   // sorted by t, unique t, first at t=0
    PageLayout layout;
    Viewport viewport;
    SessionAudio audio;
    std::optional<std::map<int, std::set<int>>> ground_truth;  // note_id -> passage ids
};

struct SessionWarning {
    std::string code;       // "gaze_gap" | "offscreen_ratio"
    std::string message;
};

/// Loads and validates a session directory (gaze.csv, scroll.csv,
/// layout.json, audio.wav or envelope.csv, meta.json, optional labels.csv).
/// Streams come back time-sorted; a (page 1, scroll 0) event is synthesized
/// at t=0 iff the input has no event at t=0; duplicate scroll timestamps keep
/// the last event. Throws MissingFile / ParseError / ValidationError.
Session load_session(const std::filesystem::path& dir);

/// Writes a session back out in the directory format load_session accepts.
/// load_session(save_session(s)) reproduces s exactly.
void save_session(const Session& session, const std::filesystem::path& dir);

/// Non-fatal quality checks; never mutates the session. Currently: gaze gaps
/// over 500 ms, and more than 20% of samples outside the viewport.
std::vector<SessionWarning> validate_session(const Session& session);

Envelope read_envelope_csv(const std::filesystem::path& path);
void write_envelope_csv(const std::filesystem::path& path, const Envelope& env);

bool operator==(const GazeSample&, const GazeSample&);
bool operator==(const ScrollEvent&, const ScrollEvent&);
bool operator==(const EnvelopePoint&, const EnvelopePoint&);
bool operator==(const PcmAudio&, const PcmAudio&);
bool operator==(const SessionAudio&, const SessionAudio&);
bool operator==(const Session&, const Session&);

} // namespace gazenote
