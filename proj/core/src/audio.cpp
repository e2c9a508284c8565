#include "gazenote/audio.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace gazenote {

namespace {

constexpr double kFullScale = 32768.0;
constexpr double kSilenceFloorDb = -120.0;

} // namespace

Envelope compute_envelope(std::span<const std::int16_t> samples, int sample_rate,
                          std::int64_t frame_ms) {
    if (samples.empty()) throw EmptyAudio("no audio samples");
    if (sample_rate <= 0) throw EmptyAudio("bad sample rate");
    if (frame_ms <= 0) throw ValidationError("frame_ms must be positive");

    const std::size_t frame_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(sample_rate) * frame_ms / 1000);
    Envelope env;
    env.reserve(samples.size() / frame_len + 1);
    for (std::size_t start = 0; start < samples.size(); start += frame_len) {
        const std::size_t stop = std::min(samples.size(), start + frame_len);
        double sum_sq = 0;
        for (std::size_t i = start; i < stop; ++i) {
            const double v = static_cast<double>(samples[i]);
            sum_sq += v * v;
        }
        const double rms = std::sqrt(sum_sq / static_cast<double>(stop - start));
        EnvelopePoint p;
        p.t_ms = static_cast<std::int64_t>(start / frame_len) * frame_ms;
        p.db = rms > 0 ? std::max(kSilenceFloorDb, 20.0 * std::log10(rms / kFullScale))
                       : kSilenceFloorDb;
        env.push_back(p);
    }
    return env;
}

double noise_floor_db(const Envelope& env) {
    if (env.empty()) throw EmptyAudio("empty envelope");
    std::vector<double> levels;
    levels.reserve(env.size());
    for (const auto& p : env) levels.push_back(p.db);
    std::sort(levels.begin(), levels.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::floor(0.05 * static_cast<double>(levels.size() - 1)));
    return levels[idx];
}

std::vector<VoiceNote> extract_voice_notes(const Envelope& env, const AudioConfig& cfg) {
    if (env.empty()) return {};

    // frame spacing: inferred from the points themselves so injected
    // envelopes with a different rate segment correctly
    std::int64_t dt = cfg.frame_ms;
    if (env.size() >= 2) {
        std::vector<std::int64_t> diffs;
        diffs.reserve(env.size() - 1);
        for (std::size_t i = 1; i < env.size(); ++i) diffs.push_back(env[i].t_ms - env[i - 1].t_ms);
        std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
        dt = std::max<std::int64_t>(1, diffs[diffs.size() / 2]);
    }

    const double threshold = noise_floor_db(env) + cfg.threshold_db_rel;

    // maximal above-threshold runs; each point covers [t, t + dt)
    struct Run {
        std::int64_t start, end;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (env[i].db < threshold) continue;
        const std::int64_t start = env[i].t_ms;
        std::size_t j = i;
        while (j + 1 < env.size() && env[j + 1].db >= threshold &&
               env[j + 1].t_ms - env[j].t_ms <= dt)
            ++j;
        runs.push_back({start, env[j].t_ms + dt});
        i = j;
    }

    // natural pauses between words must not split a note
    std::vector<Run> merged;
    for (const auto& run : runs) {
        if (!merged.empty() && run.start - merged.back().end < cfg.merge_gap_ms)
            merged.back().end = run.end;
        else
            merged.push_back(run);
    }

    std::vector<VoiceNote> notes;
    for (const auto& run : merged) {
        if (run.end - run.start < cfg.min_note_ms) continue;
        VoiceNote note;
        note.note_id = static_cast<int>(notes.size());
        note.start_ms = run.start;
        note.end_ms = run.end;
        notes.push_back(note);
    }
    return notes;
}

std::vector<RegionOfAnalysis> compute_roas(std::span<const VoiceNote> notes,
                                           std::int64_t session_start_ms) {
    std::vector<RegionOfAnalysis> roas;
    roas.reserve(notes.size());
    std::int64_t prev_end = session_start_ms;
    for (const auto& note : notes) {
        roas.push_back({note.note_id, prev_end, note.end_ms});
        prev_end = note.end_ms;
    }
    return roas;
}

namespace {

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

} // namespace

PcmAudio read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("missing file: " + path.string());

    char tag[4];
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "RIFF", 4) != 0)
        throw ParseError(path.string(), 1, "not a RIFF file");
    read_u32(in);  // riff size
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "WAVE", 4) != 0)
        throw ParseError(path.string(), 1, "not a WAVE file");

    PcmAudio audio;
    bool have_fmt = false;
    while (in.read(tag, 4)) {
        const std::uint32_t chunk_size = read_u32(in);
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            const std::uint16_t format = read_u16(in);
            const std::uint16_t channels = read_u16(in);
            const std::uint32_t rate = read_u32(in);
            read_u32(in);  // byte rate
            read_u16(in);  // block align
            const std::uint16_t bits = read_u16(in);
            if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
            if (format != 1 || channels != 1 || bits != 16)
                throw ValidationError(path.string() + ": only 16-bit PCM mono is supported");
            audio.sample_rate = static_cast<int>(rate);
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            if (!have_fmt) throw ParseError(path.string(), 1, "data chunk before fmt chunk");
            const std::size_t n = chunk_size / 2;
            audio.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                audio.samples[i] = static_cast<std::int16_t>(read_u16(in));
            if (!in) throw ParseError(path.string(), 1, "truncated data chunk");
            return audio;
        } else {
            in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
        }
    }
    throw ParseError(path.string(), 1, "no data chunk");
}

void write_wav(const std::filesystem::path& path, const PcmAudio& audio) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    const std::uint32_t data_size = static_cast<std::uint32_t>(audio.samples.size() * 2);
    out.write("RIFF", 4);
    write_u32(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 1);  // PCM
    write_u16(out, 1);  // mono
    write_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
    write_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
    write_u16(out, 2);
    write_u16(out, 16);
    out.write("data", 4);
    write_u32(out, data_size);
    for (std::int16_t s : audio.samples)
        write_u16(out, static_cast<std::uint16_t>(s));
}

void write_notes_csv(const std::filesystem::path& path, std::span<const VoiceNote> notes) {
    std::string out = "note_id,start_ms,end_ms\n";
    for (const auto& n : notes)
        out += std::to_string(n.note_id) + "," + std::to_string(n.start_ms) + "," +
               std::to_string(n.end_ms) + "\n";
    write_text_file(path, out);
}

} // namespace gazenote
