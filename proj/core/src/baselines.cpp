#include "gazenote/baselines.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"

#include <algorithm>
#include <map>

namespace gazenote {

std::vector<AnchorPrediction> position_baseline(const VoiceNote& note,
                                                std::span<const ScrollEvent> scrolls,
                                                const PageLayout& layout, Viewport viewport) {
    const ScrollEvent& at_start = scroll_state_at(scrolls, note.start_ms);
    const std::vector<int> visible = visible_passages(layout, at_start, viewport);
    if (visible.empty())
        throw NoVisiblePassages("no passage visible at note " + std::to_string(note.note_id) +
                                " start");
    std::vector<AnchorPrediction> out;
    out.reserve(visible.size());
    for (std::size_t i = 0; i < visible.size(); ++i) {
        AnchorPrediction p;
        p.note_id = note.note_id;
        p.passage_id = visible[i];
        p.annotated = i == 0;  // topmost passage in the viewport
        p.score = p.annotated ? 1.0 : 0.0;
        out.push_back(p);
    }
    return out;
}

std::vector<AnchorPrediction> fixation_baseline(const VoiceNote& note,
                                                std::span<const DocGazeSample> doc_gaze,
                                                const PageLayout& layout,
                                                std::span<const int> candidates,
                                                const IdtConfig& baseline_idt) {
    std::vector<DocGazeSample> window;
    for (const auto& s : doc_gaze)
        if (s.on_screen && s.t_ms >= note.start_ms && s.t_ms < note.end_ms)
            window.push_back(s);

    const std::vector<Fixation> fixations =
        assign_to_passages(detect_fixations(window, baseline_idt), layout);

    std::map<int, std::size_t> counts;
    for (const auto& f : fixations) ++counts[f.passage_id];
    const double total = static_cast<double>(fixations.size());

    // argmax over the assigned counts; ties go to the lowest passage id
    int best_id = -1;
    std::size_t best_count = 0;
    for (const auto& [id, count] : counts)
        if (count > best_count) {
            best_id = id;
            best_count = count;
        }

    std::vector<AnchorPrediction> out;
    out.reserve(candidates.size());
    for (int id : candidates) {
        AnchorPrediction p;
        p.note_id = note.note_id;
        p.passage_id = id;
        p.annotated = id == best_id && best_count > 0;
        // only the winning passage carries its count fraction; everything
        // else scores 0, like the hard labels the strategy actually emits
        p.score = p.annotated ? static_cast<double>(best_count) / total : 0.0;
        out.push_back(p);
    }
    return out;
}

void write_predictions_csv(const std::filesystem::path& path,
                           std::span<const PredictionRow> rows) {
    std::string out = "strategy,participant_id,note_id,passage_id,score,label\n";
    for (const auto& row : rows)
        out += row.strategy + "," + row.participant_id + "," +
               std::to_string(row.pred.note_id) + "," + std::to_string(row.pred.passage_id) +
               "," + format_double(row.pred.score) + "," +
               (row.pred.annotated ? "Annotated" : "NotAnnotated") + "\n";
    write_text_file(path, out);
}

} // namespace gazenote
