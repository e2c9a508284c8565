#include "gazenote/session.hpp"

#include "gazenote/audio.hpp"
#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace gazenote {

namespace fs = std::filesystem;

namespace {

std::vector<GazeSample> load_gaze_csv(const fs::path& path) {
    CsvTable table = read_csv(path, 3);
    std::vector<GazeSample> out;
    out.reserve(table.rows.size());
    std::int64_t prev_t = -1;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        GazeSample g;
        g.t_ms = parse_int(row[0], table.file, line);
        g.x = parse_double(row[1], table.file, line);
        g.y = parse_double(row[2], table.file, line);
        if (g.t_ms < 0) throw ValidationError(table.file + ": negative timestamp");
        if (g.t_ms < prev_t) throw ValidationError(table.file + ": non-monotonic timestamps");
        prev_t = g.t_ms;
        out.push_back(g);
    }
    if (out.empty()) throw ValidationError(table.file + ": no gaze samples");
    return out;
}

std::vector<ScrollEvent> load_scroll_csv(const fs::path& path) {
    CsvTable table = read_csv(path, 3);
    std::vector<ScrollEvent> out;
    std::int64_t prev_t = -1;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        ScrollEvent e;
        e.t_ms = parse_int(row[0], table.file, line);
        e.page = static_cast<int>(parse_int(row[1], table.file, line));
        e.scroll_y = parse_double(row[2], table.file, line);
        if (e.t_ms < 0) throw ValidationError(table.file + ": negative timestamp");
        if (e.t_ms < prev_t) throw ValidationError(table.file + ": non-monotonic timestamps");
        if (e.page < 1) throw ValidationError(table.file + ": page must be >= 1");
        if (e.scroll_y < 0) throw ValidationError(table.file + ": negative scroll offset");
        prev_t = e.t_ms;
        // duplicate timestamps: the viewport state is last-writer-wins
        if (!out.empty() && out.back().t_ms == e.t_ms)
            out.back() = e;
        else
            out.push_back(e);
    }
    if (out.empty() || out.front().t_ms != 0)
        out.insert(out.begin(), ScrollEvent{0, 1, 0.0});
    return out;
}

std::optional<std::map<int, std::set<int>>> load_labels_csv(const fs::path& path,
                                                            const PageLayout& layout) {
    if (!fs::exists(path)) return std::nullopt;
    CsvTable table = read_csv(path, 2);
    std::map<int, std::set<int>> truth;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::size_t line = table.line_numbers[i];
        const int note_id = static_cast<int>(parse_int(table.rows[i][0], table.file, line));
        const int passage_id = static_cast<int>(parse_int(table.rows[i][1], table.file, line));
        if (note_id < 0) throw ValidationError(table.file + ": negative note_id");
        if (!layout.find_passage(passage_id))
            throw ValidationError(table.file + ": unknown passage_id " +
                                  std::to_string(passage_id));
        truth[note_id].insert(passage_id);
    }
    return truth;
}

} // namespace

Envelope read_envelope_csv(const fs::path& path) {
    CsvTable table = read_csv(path, 2);
    Envelope env;
    env.reserve(table.rows.size());
    std::int64_t prev_t = -1;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::size_t line = table.line_numbers[i];
        EnvelopePoint p;
        p.t_ms = parse_int(table.rows[i][0], table.file, line);
        p.db = parse_double(table.rows[i][1], table.file, line);
        if (p.t_ms <= prev_t) throw ValidationError(table.file + ": non-monotonic timestamps");
        prev_t = p.t_ms;
        env.push_back(p);
    }
    if (env.empty()) throw ValidationError(table.file + ": empty envelope");
    return env;
}

void write_envelope_csv(const fs::path& path, const Envelope& env) {
    std::string out = "t_ms,db\n";
    for (const auto& p : env)
        out += std::to_string(p.t_ms) + "," + format_double(p.db) + "\n";
    write_text_file(path, out);
}

Session load_session(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw MissingFile("no session directory: " + dir.string());

    const fs::path meta_path = dir / "meta.json";
    if (!fs::exists(meta_path)) throw MissingFile("missing file: " + meta_path.string());
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_text_file(meta_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(meta_path.string(), 1, e.what());
    }

    Session s;
    try {
        s.participant_id = meta.at("participant_id").get<std::string>();
        s.viewport.width = meta.at("viewport_w").get<int>();
        s.viewport.height = meta.at("viewport_h").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(meta_path.string(), 1, e.what());
    }
    if (s.viewport.width <= 0 || s.viewport.height <= 0)
        throw ValidationError(meta_path.string() + ": viewport dimensions must be positive");

    s.layout = load_layout(dir / "layout.json");
    s.gaze = load_gaze_csv(dir / "gaze.csv");
    s.scrolls = load_scroll_csv(dir / "scroll.csv");

    const fs::path env_path = dir / "envelope.csv";
    const fs::path wav_path = dir / "audio.wav";
    if (fs::exists(env_path))
        s.audio.envelope = read_envelope_csv(env_path);
    else if (fs::exists(wav_path))
        s.audio.pcm = read_wav(wav_path);
    else
        throw MissingFile("session needs envelope.csv or audio.wav in " + dir.string());

    s.ground_truth = load_labels_csv(dir / "labels.csv", s.layout);
    return s;
}

void save_session(const Session& session, const fs::path& dir) {
    fs::create_directories(dir);

    nlohmann::json meta;
    meta["participant_id"] = session.participant_id;
    meta["viewport_w"] = session.viewport.width;
    meta["viewport_h"] = session.viewport.height;
    write_text_file(dir / "meta.json", meta.dump(2) + "\n");

    write_text_file(dir / "layout.json", layout_to_json(session.layout));

    std::string gaze = "t_ms,x_px,y_px\n";
    for (const auto& g : session.gaze)
        gaze += std::to_string(g.t_ms) + "," + format_double(g.x) + "," + format_double(g.y) +
                "\n";
    write_text_file(dir / "gaze.csv", gaze);

    std::string scroll = "t_ms,page,scroll_y_px\n";
    for (const auto& e : session.scrolls)
        scroll += std::to_string(e.t_ms) + "," + std::to_string(e.page) + "," +
                  format_double(e.scroll_y) + "\n";
    write_text_file(dir / "scroll.csv", scroll);

    // drop stale counterparts so a reused directory reloads to this session
    if (session.audio.envelope) {
        fs::remove(dir / "audio.wav");
        write_envelope_csv(dir / "envelope.csv", *session.audio.envelope);
    } else if (session.audio.pcm) {
        fs::remove(dir / "envelope.csv");
        write_wav(dir / "audio.wav", *session.audio.pcm);
    } else {
        throw ValidationError("session has no audio stream");
    }

    if (session.ground_truth) {
        std::string labels = "note_id,passage_id\n";
        for (const auto& [note_id, passages] : *session.ground_truth)
            for (int pid : passages)
                labels += std::to_string(note_id) + "," + std::to_string(pid) + "\n";
        write_text_file(dir / "labels.csv", labels);
    } else {
        fs::remove(dir / "labels.csv");
    }
}

std::vector<SessionWarning> validate_session(const Session& session) {
    std::vector<SessionWarning> warnings;

    std::size_t gap_count = 0;
    std::int64_t max_gap = 0;
    for (std::size_t i = 1; i < session.gaze.size(); ++i) {
        const std::int64_t gap = session.gaze[i].t_ms - session.gaze[i - 1].t_ms;
        if (gap > 500) {
            ++gap_count;
            max_gap = std::max(max_gap, gap);
        }
    }
    if (gap_count > 0) {
        std::ostringstream msg;
        msg << gap_count << " gaze gap(s) over 500 ms (largest " << max_gap << " ms)";
        warnings.push_back({"gaze_gap", msg.str()});
    }

    if (!session.gaze.empty()) {
        std::size_t off = 0;
        for (const auto& g : session.gaze)
            if (g.x < 0 || g.x >= session.viewport.width || g.y < 0 ||
                g.y >= session.viewport.height)
                ++off;
        const double ratio = static_cast<double>(off) / static_cast<double>(session.gaze.size());
        if (ratio > 0.20) {
            std::ostringstream msg;
            msg << "off-screen ratio " << static_cast<int>(ratio * 100 + 0.5)
                << "% exceeds 20% of samples";
            warnings.push_back({"offscreen_ratio", msg.str()});
        }
    }
    return warnings;
}

bool operator==(const GazeSample& a, const GazeSample& b) {
    return a.t_ms == b.t_ms && a.x == b.x && a.y == b.y;
}

bool operator==(const ScrollEvent& a, const ScrollEvent& b) {
    return a.t_ms == b.t_ms && a.page == b.page && a.scroll_y == b.scroll_y;
}

bool operator==(const EnvelopePoint& a, const EnvelopePoint& b) {
    return a.t_ms == b.t_ms && a.db == b.db;
}

bool operator==(const PcmAudio& a, const PcmAudio& b) {
    return a.sample_rate == b.sample_rate && a.samples == b.samples;
}

bool operator==(const SessionAudio& a, const SessionAudio& b) {
    return a.envelope == b.envelope && a.pcm == b.pcm;
}

bool operator==(const Session& a, const Session& b) {
    return a.participant_id == b.participant_id && a.gaze == b.gaze && a.scrolls == b.scrolls &&
           a.layout == b.layout && a.viewport.width == b.viewport.width &&
           a.viewport.height == b.viewport.height && a.audio == b.audio &&
           a.ground_truth == b.ground_truth;
}

} // namespace gazenote
