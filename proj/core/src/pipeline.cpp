#include "gazenote/pipeline.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"
#include "gazenote/fixations.hpp"

#include <algorithm>

namespace gazenote {

namespace fs = std::filesystem;

SessionPipeline run_session_pipeline(const Session& session, const PipelineConfig& cfg) {
    SessionPipeline pipe;
    pipe.participant_id = session.participant_id;

    if (session.audio.envelope)
        pipe.envelope = *session.audio.envelope;
    else if (session.audio.pcm)
        pipe.envelope = compute_envelope(session.audio.pcm->samples,
                                         session.audio.pcm->sample_rate, cfg.audio.frame_ms);
    else
        throw ValidationError("session has no audio stream");

    pipe.notes = extract_voice_notes(pipe.envelope, cfg.audio);
    pipe.roas = compute_roas(pipe.notes, 0);
    pipe.doc_gaze = map_gaze_to_document(session.gaze, session.scrolls, session.viewport);
    pipe.clean_gaze = remove_outliers(pipe.doc_gaze);

    for (std::size_t i = 0; i < pipe.notes.size(); ++i) {
        const VoiceNote& note = pipe.notes[i];
        const RegionOfAnalysis& roa = pipe.roas[i];

        // ROA sample window is half-open: a sample on the shared boundary
        // belongs to the next note's region
        std::vector<DocGazeSample> roa_samples;
        for (const auto& s : pipe.clean_gaze)
            if (s.t_ms >= roa.start_ms && s.t_ms < roa.end_ms) roa_samples.push_back(s);

        std::vector<Fixation> fixations =
            assign_to_passages(detect_fixations(roa_samples, cfg.idt), session.layout);
        const std::vector<Saccade> saccades = extract_saccades(fixations);
        std::vector<int> candidates =
            candidate_passages(roa, note.start_ms, pipe.doc_gaze, session.scrolls,
                               session.layout, session.viewport);

        std::vector<PassageFeatureVector> vectors =
            featurize_roa(roa, note, fixations, saccades, candidates, session.layout);
        for (auto& v : vectors) {
            if (session.ground_truth) {
                auto it = session.ground_truth->find(note.note_id);
                const bool annotated = it != session.ground_truth->end() &&
                                       it->second.count(v.passage_id) > 0;
                v.label = annotated ? NoteLabel::Annotated : NoteLabel::NotAnnotated;
            } else {
                v.label = NoteLabel::Unknown;
            }
            pipe.feature_rows.push_back({session.participant_id, v});
        }
        pipe.candidates.push_back(std::move(candidates));
        pipe.roa_fixations.push_back(std::move(fixations));
    }
    return pipe;
}

std::vector<PredictionRow> position_predictions(const Session& session,
                                                const SessionPipeline& pipe) {
    std::vector<PredictionRow> rows;
    for (const auto& note : pipe.notes) {
        std::vector<AnchorPrediction> preds;
        try {
            preds = position_baseline(note, session.scrolls, session.layout, session.viewport);
        } catch (const NoVisiblePassages&) {
            continue;  // nothing visible at note start: no rows for this note
        }
        for (const auto& p : preds) rows.push_back({"position", session.participant_id, p});
    }
    return rows;
}

std::vector<PredictionRow> fixation_predictions(const Session& session,
                                                const SessionPipeline& pipe,
                                                const PipelineConfig& cfg) {
    std::vector<PredictionRow> rows;
    for (std::size_t i = 0; i < pipe.notes.size(); ++i) {
        const auto preds = fixation_baseline(pipe.notes[i], pipe.doc_gaze, session.layout,
                                             pipe.candidates[i], cfg.baseline_idt());
        for (const auto& p : preds) rows.push_back({"fixation", session.participant_id, p});
    }
    return rows;
}

std::vector<ScoredRow> scored_rows_from_predictions(std::span<const PredictionRow> preds,
                                                    const Session& session) {
    if (!session.ground_truth)
        throw ValidationError("session " + session.participant_id + " has no ground truth");
    std::vector<ScoredRow> rows;
    rows.reserve(preds.size());
    for (const auto& p : preds) {
        ScoredRow r;
        r.participant = p.participant_id;
        r.note_id = p.pred.note_id;
        r.passage_id = p.pred.passage_id;
        r.score = p.pred.score;
        r.predicted = p.pred.annotated ? 1 : 0;
        auto it = session.ground_truth->find(p.pred.note_id);
        r.truth = (it != session.ground_truth->end() && it->second.count(p.pred.passage_id) > 0)
                      ? 1
                      : 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<fs::path> corpus_session_dirs(const fs::path& corpus_dir) {
    if (!fs::is_directory(corpus_dir))
        throw MissingFile("no corpus directory: " + corpus_dir.string());
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(corpus_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "meta.json"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty())
        throw ValidationError("no session directories under " + corpus_dir.string());
    return dirs;
}

std::map<int, std::string> read_note_types_csv(const fs::path& path) {
    CsvTable table = read_csv(path, 2);
    std::map<int, std::string> types;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        types[static_cast<int>(parse_int(table.rows[i][0], table.file, table.line_numbers[i]))] =
            table.rows[i][1];
    return types;
}

void write_note_types_csv(const fs::path& path, const std::map<int, std::string>& types) {
    std::string out = "note_id,type\n";
    for (const auto& [id, type] : types) out += std::to_string(id) + "," + type + "\n";
    write_text_file(path, out);
}

} // namespace gazenote
