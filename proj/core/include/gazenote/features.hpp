#pragma once

#include "gazenote/audio.hpp"
#include "gazenote/fixations.hpp"
#include "gazenote/layout.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gazenote {

enum class NoteLabel { Annotated, NotAnnotated, Unknown };

const char* note_label_name(NoteLabel label);
NoteLabel note_label_from_name(const std::string& name);

inline constexpr std::size_t kFeatureCount = 15;

/// Column order of the 15-feature vector (f1..f15 in features.csv).
extern const std::array<const char*, kFeatureCount> kFeatureNames;

struct PassageFeatureVector {
    int note_id = 0;
    int passage_id = 0;
    std::array<double, kFeatureCount> f{};   // indexed per kFeatureNames
    NoteLabel label = NoteLabel::Unknown;
};

// feature indices (0-based) into PassageFeatureVector::f
inline constexpr std::size_t kNormFixationCount = 0;
inline constexpr std::size_t kMaxFixationDuration = 1;
inline constexpr std::size_t kMinFixationDuration = 2;
inline constexpr std::size_t kAvgFixationDuration = 3;
inline constexpr std::size_t kMaxSaccadeLength = 4;
inline constexpr std::size_t kMinSaccadeLength = 5;
inline constexpr std::size_t kAvgSaccadeLength = 6;
inline constexpr std::size_t kMaxSaccadeDuration = 7;
inline constexpr std::size_t kMinSaccadeDuration = 8;
inline constexpr std::size_t kAvgSaccadeDuration = 9;
inline constexpr std::size_t kMaxSaccadeVelocity = 10;
inline constexpr std::size_t kMinSaccadeVelocity = 11;
inline constexpr std::size_t kAvgSaccadeVelocity = 12;
inline constexpr std::size_t kNormTimeDuration = 13;
inline constexpr std::size_t kTemporalOrder = 14;

/// Candidate passages for one note: every passage that received a mapped
/// on-screen gaze sample inside the ROA, plus every passage visible at the
/// note start. Sorted by passage id.
std::vector<int> candidate_passages(const RegionOfAnalysis& roa, std::int64_t note_start_ms,
                                    std::span<const DocGazeSample> doc_gaze,
                                    std::span<const ScrollEvent> scrolls,
                                    const PageLayout& layout, Viewport viewport);

/// Per-passage recency of reading: note_start minus the mean start time of
/// the passage's first (up to) five fixations, min-max normalized over
/// passages with fixations to [0,1] (0 = read nearest the note start).
/// Passages without fixations get 1.0; a lone fixated passage gets 0.0.
std::map<int, double> temporal_order(std::span<const Fixation> fixations,
                                     std::span<const int> passage_ids,
                                     std::int64_t note_start_ms);

/// One 15-feature vector per candidate passage over the note's ROA.
/// Fixations/saccades must already be restricted to the ROA and assigned to
/// passages. Passages with no events get all-zero gaze features and
/// temporal order 1.0. Throws EmptyLayout if the layout has no passages.
std::vector<PassageFeatureVector> featurize_roa(const RegionOfAnalysis& roa,
                                                const VoiceNote& note,
                                                std::span<const Fixation> fixations,
                                                std::span<const Saccade> saccades,
                                                std::span<const int> candidates,
                                                const PageLayout& layout);

/// Row of the features.csv interchange format.
struct FeatureRow {
    std::string participant_id;
    PassageFeatureVector vec;
};

void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows);
std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path);

} // namespace gazenote
