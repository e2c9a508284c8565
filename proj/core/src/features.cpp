#include "gazenote/features.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gazenote {

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "norm_fixation_count",
    "max_fixation_duration",
    "min_fixation_duration",
    "avg_fixation_duration",
    "max_saccade_length",
    "min_saccade_length",
    "avg_saccade_length",
    "max_saccade_duration",
    "min_saccade_duration",
    "avg_saccade_duration",
    "max_saccade_velocity",
    "min_saccade_velocity",
    "avg_saccade_velocity",
    "norm_time_duration",
    "temporal_order",
};

const char* note_label_name(NoteLabel label) {
    switch (label) {
        case NoteLabel::Annotated: return "Annotated";
        case NoteLabel::NotAnnotated: return "NotAnnotated";
        case NoteLabel::Unknown: return "Unknown";
    }
    return "Unknown";
}

NoteLabel note_label_from_name(const std::string& name) {
    if (name == "Annotated") return NoteLabel::Annotated;
    if (name == "NotAnnotated") return NoteLabel::NotAnnotated;
    if (name == "Unknown") return NoteLabel::Unknown;
    throw ParseError("unknown label '" + name + "'");
}

std::vector<int> candidate_passages(const RegionOfAnalysis& roa, std::int64_t note_start_ms,
                                    std::span<const DocGazeSample> doc_gaze,
                                    std::span<const ScrollEvent> scrolls,
                                    const PageLayout& layout, Viewport viewport) {
    std::set<int> ids;
    for (const auto& s : doc_gaze) {
        if (!s.on_screen || s.t_ms < roa.start_ms || s.t_ms >= roa.end_ms) continue;
        const Page* page = layout.find_page(s.page);
        if (!page) continue;
        for (const auto& psg : page->passages)
            if (psg.contains(s.x, s.y)) {
                ids.insert(psg.id);
                break;  // passages on a page do not overlap
            }
    }
    if (!scrolls.empty()) {
        const ScrollEvent& at_start = scroll_state_at(scrolls, note_start_ms);
        if (layout.find_page(at_start.page))
            for (int id : visible_passages(layout, at_start, viewport)) ids.insert(id);
    }
    return {ids.begin(), ids.end()};
}

std::map<int, double> temporal_order(std::span<const Fixation> fixations,
                                     std::span<const int> passage_ids,
                                     std::int64_t note_start_ms) {
    // mean start time of the first (up to) five fixations per passage
    std::map<int, std::pair<double, int>> first_five;  // passage -> (sum, count)
    for (const auto& f : fixations) {
        auto& [sum, count] = first_five[f.passage_id];
        if (count >= 5) continue;
        sum += static_cast<double>(f.start_ms);
        ++count;
    }

    std::map<int, double> delta;  // elapsed time from reading to note start
    for (int id : passage_ids) {
        auto it = first_five.find(id);
        if (it == first_five.end() || it->second.second == 0) continue;
        delta[id] = static_cast<double>(note_start_ms) -
                    it->second.first / static_cast<double>(it->second.second);
    }

    std::map<int, double> out;
    for (int id : passage_ids) out[id] = 1.0;  // never read in this ROA
    if (delta.empty()) return out;

    double lo = delta.begin()->second, hi = delta.begin()->second;
    for (const auto& [id, d] : delta) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    for (const auto& [id, d] : delta)
        out[id] = hi > lo ? (d - lo) / (hi - lo) : 0.0;
    return out;
}

std::vector<PassageFeatureVector> featurize_roa(const RegionOfAnalysis& roa,
                                                const VoiceNote& note,
                                                std::span<const Fixation> fixations,
                                                std::span<const Saccade> saccades,
                                                std::span<const int> candidates,
                                                const PageLayout& layout) {
    if (layout.passage_count() == 0) throw EmptyLayout("layout has no passages");

    struct Stats {
        std::vector<double> fix_durations;
        double fix_time = 0;
        std::vector<double> sac_lengths, sac_durations, sac_velocities;
    };
    std::map<int, Stats> per_passage;
    for (const auto& f : fixations) {
        auto& st = per_passage[f.passage_id];
        const double dur = static_cast<double>(f.end_ms - f.start_ms);
        st.fix_durations.push_back(dur);
        st.fix_time += dur;
    }
    for (const auto& s : saccades) {
        auto& st = per_passage[s.passage_id];
        st.sac_lengths.push_back(s.length_px);
        st.sac_durations.push_back(static_cast<double>(s.duration_ms));
        st.sac_velocities.push_back(s.velocity);
    }

    const auto order = temporal_order(fixations, candidates, note.start_ms);

    auto max_of = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    };
    auto min_of = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
    };
    auto avg_of = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double sum = 0;
        for (double x : v) sum += x;
        return sum / static_cast<double>(v.size());
    };

    std::vector<PassageFeatureVector> out;
    out.reserve(candidates.size());
    for (int id : candidates) {
        const Passage* psg = layout.find_passage(id);
        if (!psg) throw ValidationError("candidate passage " + std::to_string(id) +
                                        " is not in the layout");
        PassageFeatureVector v;
        v.note_id = roa.note_id;
        v.passage_id = id;
        const double area = psg->area();
        auto it = per_passage.find(id);
        if (it != per_passage.end()) {
            const Stats& st = it->second;
            v.f[kNormFixationCount] = static_cast<double>(st.fix_durations.size()) / area;
            v.f[kMaxFixationDuration] = max_of(st.fix_durations);
            v.f[kMinFixationDuration] = min_of(st.fix_durations);
            v.f[kAvgFixationDuration] = avg_of(st.fix_durations);
            v.f[kMaxSaccadeLength] = max_of(st.sac_lengths);
            v.f[kMinSaccadeLength] = min_of(st.sac_lengths);
            v.f[kAvgSaccadeLength] = avg_of(st.sac_lengths);
            v.f[kMaxSaccadeDuration] = max_of(st.sac_durations);
            v.f[kMinSaccadeDuration] = min_of(st.sac_durations);
            v.f[kAvgSaccadeDuration] = avg_of(st.sac_durations);
            v.f[kMaxSaccadeVelocity] = max_of(st.sac_velocities);
            v.f[kMinSaccadeVelocity] = min_of(st.sac_velocities);
            v.f[kAvgSaccadeVelocity] = avg_of(st.sac_velocities);
            v.f[kNormTimeDuration] = st.fix_time / area;
        }
        v.f[kTemporalOrder] = order.at(id);
        out.push_back(v);
    }
    return out;
}

void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows) {
    std::string out = "participant_id,note_id,passage_id";
    for (std::size_t i = 1; i <= kFeatureCount; ++i) out += ",f" + std::to_string(i);
    out += ",label\n";
    for (const auto& row : rows) {
        out += row.participant_id + "," + std::to_string(row.vec.note_id) + "," +
               std::to_string(row.vec.passage_id);
        for (double f : row.vec.f) out += "," + format_double(f);
        out += std::string(",") + note_label_name(row.vec.label) + "\n";
    }
    write_text_file(path, out);
}

std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path) {
    CsvTable table = read_csv(path, 4 + kFeatureCount);
    std::vector<FeatureRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        FeatureRow row;
        row.participant_id = r[0];
        row.vec.note_id = static_cast<int>(parse_int(r[1], table.file, line));
        row.vec.passage_id = static_cast<int>(parse_int(r[2], table.file, line));
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            row.vec.f[f] = parse_double(r[3 + f], table.file, line);
        try {
            row.vec.label = note_label_from_name(r[3 + kFeatureCount]);
        } catch (const ParseError&) {
            throw ParseError(table.file, line, "unknown label '" + r[3 + kFeatureCount] + "'");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace gazenote
