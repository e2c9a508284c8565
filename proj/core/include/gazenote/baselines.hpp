#pragma once

#include "gazenote/audio.hpp"
#include "gazenote/fixations.hpp"
#include "gazenote/layout.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gazenote {

/// Scored anchoring decision for one (note, passage) pair; the common output
/// schema of the learned model and both baselines.
struct AnchorPrediction {
    int note_id = 0;
    int passage_id = 0;
    double score = 0;       // in [0,1]
    bool annotated = false;
};

/// Scroll-position strategy: the topmost passage visible when the note
/// starts is Annotated (score 1), all other visible passages NotAnnotated
/// (score 0). Throws NoVisiblePassages when nothing is visible.
std::vector<AnchorPrediction> position_baseline(const VoiceNote& note,
                                                std::span<const ScrollEvent> scrolls,
                                                const PageLayout& layout, Viewport viewport);

/// Fixation-count strategy: fixations are detected over the utterance window
/// [note.start, note.end) with the baseline I-DT parameters and assigned to
/// passages; the passage with the highest count is Annotated (count ties go
/// to the lowest id). Scores are per-candidate count fractions. With no
/// fixations, every candidate is NotAnnotated.
std::vector<AnchorPrediction> fixation_baseline(const VoiceNote& note,
                                                std::span<const DocGazeSample> doc_gaze,
                                                const PageLayout& layout,
                                                std::span<const int> candidates,
                                                const IdtConfig& baseline_idt);

/// Row of the predictions.csv interchange format.
struct PredictionRow {
    std::string strategy;
    std::string participant_id;
    AnchorPrediction pred;
};

void write_predictions_csv(const std::filesystem::path& path,
                           std::span<const PredictionRow> rows);

} // namespace gazenote
