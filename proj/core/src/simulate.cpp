#include "gazenote/simulate.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"
#include "gazenote/parallel.hpp"
#include "gazenote/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace gazenote {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kSampleStepMs = 11;      // ~90 Hz
constexpr std::int64_t kEnvelopeFrameMs = 10;
constexpr double kSpeechDb = -30.0;
constexpr double kSilenceDb = -70.0;
constexpr double kGazeJitterPx = 2.0;
constexpr int kViewportW = 960;
constexpr int kViewportH = 720;

std::int64_t snap_up(std::int64_t t, std::int64_t grid) {
    return (t + grid - 1) / grid * grid;
}

} // namespace

BehaviorProfile profile_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("profile: ") + e.what());
    }
    BehaviorProfile p;
    auto read_behavior = [&](const char* key, NoteBehavior& b) {
        if (!j.contains(key)) return;
        const auto& jb = j.at(key);
        if (jb.contains("adherence")) b.adherence = jb.at("adherence").get<double>();
        if (jb.contains("note_min_ms")) b.note_min_ms = jb.at("note_min_ms").get<std::int64_t>();
        if (jb.contains("note_max_ms")) b.note_max_ms = jb.at("note_max_ms").get<std::int64_t>();
    };
    try {
        if (j.contains("mix")) {
            p.mix_short = j.at("mix").value("short", p.mix_short);
            p.mix_reflective = j.at("mix").value("reflective", p.mix_reflective);
            p.mix_summary = j.at("mix").value("summary", p.mix_summary);
        }
        read_behavior("short", p.short_note);
        read_behavior("reflective", p.reflective_note);
        read_behavior("summary", p.summary_note);
        p.fixation_mean_ms = j.value("fixation_mean_ms", p.fixation_mean_ms);
        p.fixation_sd_ms = j.value("fixation_sd_ms", p.fixation_sd_ms);
        p.within_line_saccade_px = j.value("within_line_saccade_px", p.within_line_saccade_px);
        p.reading_speed_px_per_ms = j.value("reading_speed_px_per_ms", p.reading_speed_px_per_ms);
        p.summary_min_passages = j.value("summary_min_passages", p.summary_min_passages);
        p.summary_max_passages = j.value("summary_max_passages", p.summary_max_passages);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("profile: ") + e.what());
    }
    const double mix = p.mix_short + p.mix_reflective + p.mix_summary;
    if (std::abs(mix - 1.0) > 1e-9)
        throw ValidationError("profile note-type mix must sum to 1");
    return p;
}

std::string profile_to_json(const BehaviorProfile& p) {
    nlohmann::json j;
    j["mix"] = {{"short", p.mix_short},
                {"reflective", p.mix_reflective},
                {"summary", p.mix_summary}};
    auto behavior = [](const NoteBehavior& b) {
        return nlohmann::json{{"adherence", b.adherence},
                              {"note_min_ms", b.note_min_ms},
                              {"note_max_ms", b.note_max_ms}};
    };
    j["short"] = behavior(p.short_note);
    j["reflective"] = behavior(p.reflective_note);
    j["summary"] = behavior(p.summary_note);
    j["fixation_mean_ms"] = p.fixation_mean_ms;
    j["fixation_sd_ms"] = p.fixation_sd_ms;
    j["within_line_saccade_px"] = p.within_line_saccade_px;
    j["reading_speed_px_per_ms"] = p.reading_speed_px_per_ms;
    j["summary_min_passages"] = p.summary_min_passages;
    j["summary_max_passages"] = p.summary_max_passages;
    return j.dump(2) + "\n";
}

BehaviorProfile load_profile(const fs::path& path) {
    return profile_from_json(read_text_file(path));
}

PageLayout make_synthetic_layout(Rng& rng) {
    PageLayout layout;
    const int n_pages = 3 + static_cast<int>(rng.below(2));
    int next_id = 0;
    for (int page_no = 1; page_no <= n_pages; ++page_no) {
        Page page;
        page.page = page_no;
        page.w = 960;
        page.h = 1280;
        double y = 80;
        while (page.passages.size() < 6) {
            const double h = 24.0 * static_cast<double>(4 + rng.below(4));
            if (y + h > page.h - 60) break;
            Passage p;
            p.id = next_id++;
            p.page = page_no;
            p.x = 60;
            p.y = y;
            p.w = 480 + static_cast<double>(rng.below(160));
            p.h = h;
            page.passages.push_back(p);
            y += h + 40 + static_cast<double>(rng.below(20));
        }
        layout.pages.push_back(std::move(page));
    }
    return layout;
}

namespace {

enum class NoteType { Short, Reflective, Summary };

const char* note_type_name(NoteType t) {
    switch (t) {
        case NoteType::Short: return "short";
        case NoteType::Reflective: return "reflective";
        case NoteType::Summary: return "summary";
    }
    return "short";
}

/// Builds one participant's gaze / scroll / note timeline in document space.
class ParticipantBuilder {
public:
    ParticipantBuilder(const PageLayout& layout, const BehaviorProfile& profile,
                       std::uint64_t seed)
        : layout_(layout), profile_(profile), rng_(seed),
          reading_order_(layout.all_passages()) {}

    SimulatedSession run(int n_notes, const std::string& participant_id) {
        SimulatedSession sim;
        scroll_to(0, *reading_order_[0]);

        std::map<int, std::set<int>> truth;
        for (int note_id = 0; note_id < n_notes; ++note_id) {
            const NoteType type = sample_type();
            int n_read = 1;
            if (type == NoteType::Summary)
                n_read = static_cast<int>(rng_.range(profile_.summary_min_passages,
                                                     profile_.summary_max_passages));

            // occasional glance back at an already visible passage before
            // settling on the next one; creates hard negative candidates
            if (rng_.bernoulli(0.3)) wander_fixations(2 + rng_.below(4));

            std::vector<const Passage*> targets;
            for (int k = 0; k < n_read; ++k) {
                const Passage* p = next_passage();
                read_passage(*p);
                targets.push_back(p);
            }

            // silence since the previous note must exceed the merge gap
            if (note_id > 0 && t_ < last_note_end_ + 1500)
                dwell_near(*targets.back(), last_note_end_ + 1500 - t_);

            const NoteBehavior& behavior = behavior_of(type);
            const std::int64_t start = snap_up(t_, kEnvelopeFrameMs);
            const std::int64_t dur = snap_up(
                rng_.range(behavior.note_min_ms, behavior.note_max_ms), kEnvelopeFrameMs);
            const std::int64_t end = start + dur;
            utterance_gaze(targets, behavior.adherence, end);
            t_ = std::max(t_, end);
            last_note_end_ = end;

            VoiceNote note;
            note.note_id = note_id;
            note.start_ms = start;
            note.end_ms = end;
            sim.notes.push_back(note);
            sim.note_types[note_id] = note_type_name(type);
            for (const Passage* p : targets) truth[note_id].insert(p->id);
        }
        dwell_near(*reading_order_[read_idx_ % reading_order_.size()], 1000);

        Session session;
        session.participant_id = participant_id;
        session.gaze = std::move(gaze_);
        session.scrolls = std::move(scrolls_);
        session.layout = layout_;
        session.viewport = {kViewportW, kViewportH};
        session.audio.envelope = make_envelope(sim.notes);
        session.ground_truth = std::move(truth);
        sim.session = std::move(session);
        sim.injected_fixations = injected_fixations_;
        return sim;
    }

private:
    NoteType sample_type() {
        const double u = rng_.uniform();
        if (u < profile_.mix_short) return NoteType::Short;
        if (u < profile_.mix_short + profile_.mix_reflective) return NoteType::Reflective;
        return NoteType::Summary;
    }

    const NoteBehavior& behavior_of(NoteType type) const {
        switch (type) {
            case NoteType::Short: return profile_.short_note;
            case NoteType::Reflective: return profile_.reflective_note;
            case NoteType::Summary: return profile_.summary_note;
        }
        return profile_.short_note;
    }

    const Passage* next_passage() {
        const Passage* p = reading_order_[read_idx_ % reading_order_.size()];
        ++read_idx_;
        ensure_visible(*p);
        return p;
    }

    void scroll_to(std::int64_t t, const Passage& p) {
        const Page* page = layout_.find_page(p.page);
        const double max_scroll = std::max(0.0, page->h - kViewportH);
        ScrollEvent ev;
        ev.t_ms = t;
        ev.page = p.page;
        ev.scroll_y = std::clamp(p.y - 100.0, 0.0, max_scroll);
        if (!scrolls_.empty() && scrolls_.back().t_ms == ev.t_ms)
            scrolls_.back() = ev;     // keep streams canonical for round-trips
        else
            scrolls_.push_back(ev);
        cur_page_ = ev.page;
        cur_scroll_ = ev.scroll_y;
    }

    void ensure_visible(const Passage& p) {
        const bool fits = p.page == cur_page_ && p.y >= cur_scroll_ &&
                          p.y + p.h <= cur_scroll_ + kViewportH;
        if (!fits) {
            scroll_to(t_, p);
            t_ += kSampleStepMs;
        }
    }

    void emit_fixation(double doc_x, double doc_y, std::int64_t dur_ms) {
        // n samples span (n-1) steps; one extra keeps the detected span from
        // dropping below the intended duration
        const std::int64_t n = std::max<std::int64_t>(2, dur_ms / kSampleStepMs + 1);
        for (std::int64_t i = 0; i < n; ++i) {
            GazeSample g;
            g.t_ms = t_;
            g.x = doc_x + rng_.normal(0.0, kGazeJitterPx);
            g.y = doc_y - cur_scroll_ + rng_.normal(0.0, kGazeJitterPx);
            gaze_.push_back(g);
            t_ += kSampleStepMs;
        }
        ++injected_fixations_;
    }

    double reading_fix_duration() {
        return std::clamp(rng_.normal(profile_.fixation_mean_ms, profile_.fixation_sd_ms),
                          120.0, 500.0);
    }

    void read_passage(const Passage& p) {
        ensure_visible(p);
        const double line_h = std::max(22.0, p.h / 5.0);
        for (double y = p.y + line_h / 2; y < p.y + p.h - 4; y += line_h) {
            double x = p.x + 15;
            while (x < p.x + p.w - 10) {
                const double dur = reading_fix_duration();
                emit_fixation(x, y, static_cast<std::int64_t>(dur));
                x += std::max(60.0, profile_.reading_speed_px_per_ms * dur +
                                        rng_.normal(0.0, profile_.within_line_saccade_px));
            }
        }
    }

    // random point inside the visible part of a passage
    std::pair<double, double> visible_point(const Passage& p) {
        const double top = std::max(p.y + 6, cur_scroll_ + 6.0);
        const double bottom = std::min(p.y + p.h - 6, cur_scroll_ + kViewportH - 6.0);
        const double y = bottom > top ? rng_.uniform(top, bottom)
                                      : std::clamp(p.y + p.h / 2, cur_scroll_ + 6.0,
                                                   cur_scroll_ + kViewportH - 6.0);
        return {rng_.uniform(p.x + 8, p.x + p.w - 8), y};
    }

    std::vector<const Passage*> currently_visible() {
        std::vector<const Passage*> out;
        const Page* page = layout_.find_page(cur_page_);
        for (const auto& psg : page->passages)
            if (psg.y < cur_scroll_ + kViewportH && psg.y + psg.h > cur_scroll_)
                out.push_back(&psg);
        return out;
    }

    void wander_fixations(std::uint64_t count) {
        const auto visible = currently_visible();
        if (visible.empty()) return;
        for (std::uint64_t i = 0; i < count; ++i) {
            const Passage* p = visible[rng_.below(visible.size())];
            const auto [x, y] = visible_point(*p);
            emit_fixation(x, y, static_cast<std::int64_t>(reading_fix_duration()));
        }
    }

    void dwell_near(const Passage& p, std::int64_t dur_ms) {
        ensure_visible(p);
        const std::int64_t until = t_ + dur_ms;
        while (t_ < until) {
            const auto [x, y] = visible_point(p);
            emit_fixation(x, y, static_cast<std::int64_t>(reading_fix_duration()));
        }
    }

    void utterance_gaze(const std::vector<const Passage*>& targets, double adherence,
                        std::int64_t end) {
        const auto visible = currently_visible();
        std::vector<const Passage*> visible_targets;
        for (const Passage* p : targets)
            if (std::find(visible.begin(), visible.end(), p) != visible.end())
                visible_targets.push_back(p);
        if (visible_targets.empty()) visible_targets.push_back(targets.back());

        // two fixed distractors make the off-target gaze lumpy, the way a
        // reader rests on some unrelated paragraph while speaking
        std::vector<const Passage*> distractors;
        for (const Passage* p : visible)
            if (std::find(targets.begin(), targets.end(), p) == targets.end())
                distractors.push_back(p);
        while (distractors.size() > 2) distractors.erase(distractors.begin() +
                                                         rng_.below(distractors.size()));

        // deterministic anti-clustered schedule: fixation i leaves the target
        // iff the cumulative off-target quota increments at i
        std::size_t i = 0;
        while (t_ < end) {
            const double off_quota = 1.0 - adherence;
            const bool off_target =
                std::floor(static_cast<double>(i + 1) * off_quota) >
                std::floor(static_cast<double>(i) * off_quota);
            const Passage* p = nullptr;
            if (!off_target || distractors.empty()) {
                p = visible_targets[rng_.below(visible_targets.size())];
            } else if (rng_.bernoulli(0.85)) {
                p = distractors[rng_.below(distractors.size())];
            } else {
                p = visible[rng_.below(visible.size())];
            }
            const double dur = std::clamp(rng_.normal(330.0, 60.0), 250.0, 450.0);
            const std::int64_t n_samples =
                std::max<std::int64_t>(2, static_cast<std::int64_t>(dur) / kSampleStepMs + 1);
            if (t_ + n_samples * kSampleStepMs > end) {
                // pad the tail of the window on the last point instead of
                // starting a fixation that would spill past the note end
                if (!gaze_.empty()) {
                    while (t_ < end) {
                        GazeSample g = gaze_.back();
                        g.t_ms = t_;
                        gaze_.push_back(g);
                        t_ += kSampleStepMs;
                    }
                }
                break;
            }
            const auto [x, y] = visible_point(*p);
            emit_fixation(x, y, static_cast<std::int64_t>(dur));
            ++i;
        }
    }

    Envelope make_envelope(const std::vector<VoiceNote>& notes) {
        const std::int64_t end = snap_up(t_ + 500, kEnvelopeFrameMs);
        Envelope env;
        env.reserve(static_cast<std::size_t>(end / kEnvelopeFrameMs));
        std::size_t note_idx = 0;
        for (std::int64_t t = 0; t < end; t += kEnvelopeFrameMs) {
            while (note_idx < notes.size() && t >= notes[note_idx].end_ms) ++note_idx;
            const bool speech = note_idx < notes.size() && t >= notes[note_idx].start_ms &&
                                t < notes[note_idx].end_ms;
            const double base = speech ? kSpeechDb : kSilenceDb;
            env.push_back({t, base + std::clamp(rng_.normal(0.0, 1.2), -3.0, 3.0)});
        }
        return env;
    }

    const PageLayout& layout_;
    const BehaviorProfile& profile_;
    Rng rng_;
    std::vector<const Passage*> reading_order_;
    std::size_t read_idx_ = 0;
    std::vector<GazeSample> gaze_;
    std::vector<ScrollEvent> scrolls_;
    std::int64_t t_ = 0;
    std::int64_t last_note_end_ = 0;
    int cur_page_ = 1;
    double cur_scroll_ = 0;
    std::size_t injected_fixations_ = 0;
};

} // namespace

SimulatedSession simulate_participant(const PageLayout& layout, const BehaviorProfile& profile,
                                      int n_notes, std::uint64_t seed,
                                      const std::string& participant_id) {
    if (layout.passage_count() < 2)
        throw LayoutTooSmall("simulation needs a layout with at least 2 passages");
    if (n_notes < 1) throw ValidationError("n_notes must be >= 1");
    ParticipantBuilder builder(layout, profile, seed);
    return builder.run(n_notes, participant_id);
}

namespace {

PcmAudio synthesize_wav(const Envelope& env, Rng& rng) {
    // 8 kHz sine bursts wherever the envelope is loud; quiet hiss elsewhere
    constexpr int kRate = 8000;
    constexpr int kFrameSamples = kRate / 100;  // 10 ms
    PcmAudio audio;
    audio.sample_rate = kRate;
    audio.samples.reserve(env.size() * kFrameSamples);
    const double threshold = noise_floor_db(env) + 20.0;
    double phase = 0;
    for (const auto& p : env) {
        const bool speech = p.db >= threshold;
        for (int i = 0; i < kFrameSamples; ++i) {
            double v;
            if (speech) {
                phase += 2.0 * 3.14159265358979323846 * 440.0 / kRate;
                v = 9000.0 * std::sin(phase);
            } else {
                v = rng.normal(0.0, 12.0);
            }
            audio.samples.push_back(static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0)));
        }
    }
    return audio;
}

} // namespace

void write_simulated_session(const SimulatedSession& sim, const fs::path& dir, bool emit_wav) {
    Session session = sim.session;
    if (emit_wav) {
        Rng rng(mix64(0xa0d10u ^ static_cast<std::uint64_t>(sim.session.gaze.size())));
        session.audio.pcm = synthesize_wav(*session.audio.envelope, rng);
        session.audio.envelope.reset();
    }
    save_session(session, dir);
    write_note_types_csv(dir / "note_types.csv", sim.note_types);
}

std::vector<std::string> simulate_corpus(const fs::path& out_dir, int n_participants,
                                         int notes_per_participant,
                                         const BehaviorProfile& profile, std::uint64_t seed,
                                         bool emit_wav, unsigned jobs) {
    if (n_participants < 1) throw ValidationError("n_participants must be >= 1");
    fs::create_directories(out_dir);
    std::vector<std::string> names(static_cast<std::size_t>(n_participants));
    int width = 2;
    for (int n = n_participants - 1; n >= 100; n /= 10) ++width;
    for (int i = 0; i < n_participants; ++i) {
        std::string idx = std::to_string(i);
        names[static_cast<std::size_t>(i)] =
            "p" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(
                                  static_cast<std::size_t>(width), idx.size()), '0') + idx;
    }
    parallel_for(static_cast<std::size_t>(n_participants), jobs, [&](std::size_t i) {
        const std::uint64_t participant_seed = derive_seed(seed, i);
        Rng layout_rng(derive_seed(participant_seed, 0));
        const PageLayout layout = make_synthetic_layout(layout_rng);
        SimulatedSession sim = simulate_participant(layout, profile, notes_per_participant,
                                                    derive_seed(participant_seed, 1), names[i]);
        write_simulated_session(sim, out_dir / names[i], emit_wav);
    });
    return names;
}

} // namespace gazenote
