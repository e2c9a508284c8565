#pragma once

#include "gazenote/audio.hpp"
#include "gazenote/baselines.hpp"
#include "gazenote/config.hpp"
#include "gazenote/eval.hpp"
#include "gazenote/features.hpp"
#include "gazenote/session.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gazenote {

/// Everything derived from one session by the six-step pipeline, up to the
/// feature matrix. Baselines reuse the intermediate streams.
struct SessionPipeline {
    std::string participant_id;
    Envelope envelope;
    std::vector<VoiceNote> notes;
    std::vector<RegionOfAnalysis> roas;
    std::vector<DocGazeSample> doc_gaze;        // mapped, outliers kept
    std::vector<DocGazeSample> clean_gaze;      // outliers removed
    std::vector<std::vector<int>> candidates;   // per note
    std::vector<std::vector<Fixation>> roa_fixations;   // per note, passage-assigned
    std::vector<FeatureRow> feature_rows;
};

/// Runs: envelope -> voice notes -> ROAs -> document mapping -> outlier
/// removal -> per-ROA I-DT -> passage assignment -> 15 features per
/// candidate passage. Labels come from the session's ground truth when
/// present, Unknown otherwise.
SessionPipeline run_session_pipeline(const Session& session, const PipelineConfig& cfg);

/// Baseline predictions for every note of a processed session.
std::vector<PredictionRow> position_predictions(const Session& session,
                                                const SessionPipeline& pipe);
std::vector<PredictionRow> fixation_predictions(const Session& session,
                                                const SessionPipeline& pipe,
                                                const PipelineConfig& cfg);

/// Scored rows (prediction joined with ground truth) for baseline output,
/// for evaluation alongside cross-validated learned scores.
std::vector<ScoredRow> scored_rows_from_predictions(std::span<const PredictionRow> preds,
                                                    const Session& session);

/// Session subdirectories of a corpus directory (those containing meta.json),
/// sorted by name.
std::vector<std::filesystem::path> corpus_session_dirs(const std::filesystem::path& corpus_dir);

/// note_types.csv reader; rows are (note_id, type).
std::map<int, std::string> read_note_types_csv(const std::filesystem::path& path);
void write_note_types_csv(const std::filesystem::path& path,
                          const std::map<int, std::string>& types);

} // namespace gazenote
