#include "gazenote/config.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"

#include <algorithm>
#include <cctype>

namespace gazenote {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("bad boolean for '" + key + "': " + value);
}

} // namespace

PipelineConfig parse_config(const std::string& text, const std::string& source_name) {
    PipelineConfig cfg;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        std::string line = trim(std::string_view(text).substr(
            start, (end == std::string::npos ? text.size() : end) - start));
        start = (end == std::string::npos) ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = trim(std::string_view(line).substr(0, hash));
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");

        auto as_double = [&] { return parse_double(value, source_name, line_no); };
        auto as_int = [&] { return parse_int(value, source_name, line_no); };

        try {
            if (key == "threshold_db_rel") cfg.audio.threshold_db_rel = as_double();
            else if (key == "min_note_ms") cfg.audio.min_note_ms = as_int();
            else if (key == "merge_gap_ms") cfg.audio.merge_gap_ms = as_int();
            else if (key == "frame_ms") cfg.audio.frame_ms = as_int();
            else if (key == "idt_dispersion_px") cfg.idt.dispersion_px = as_double();
            else if (key == "idt_duration_ms") cfg.idt.duration_ms = as_int();
            else if (key == "baseline_idt_dispersion_px") cfg.baseline_idt_dispersion_px = as_double();
            else if (key == "n_trees") cfg.forest.n_trees = static_cast<int>(as_int());
            else if (key == "max_depth") cfg.forest.max_depth = static_cast<int>(as_int());
            else if (key == "min_samples_leaf") cfg.forest.min_samples_leaf = static_cast<int>(as_int());
            else if (key == "features_per_split") cfg.forest.features_per_split = static_cast<int>(as_int());
            else if (key == "bootstrap") cfg.forest.bootstrap = parse_bool(value, key);
            else if (key == "class_weighting") cfg.forest.class_weighting = class_weighting_from_name(value);
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int());
            else
                throw ConfigError(source_name + ":" + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
        } catch (const ParseError& e) {
            throw ConfigError(e.what());
        }
    }
    cfg.forest.seed = cfg.seed;
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.string());
}

std::string config_to_text(const PipelineConfig& cfg) {
    std::string out;
    out += "threshold_db_rel = " + format_double(cfg.audio.threshold_db_rel) + "\n";
    out += "min_note_ms = " + std::to_string(cfg.audio.min_note_ms) + "\n";
    out += "merge_gap_ms = " + std::to_string(cfg.audio.merge_gap_ms) + "\n";
    out += "frame_ms = " + std::to_string(cfg.audio.frame_ms) + "\n";
    out += "idt_dispersion_px = " + format_double(cfg.idt.dispersion_px) + "\n";
    out += "idt_duration_ms = " + std::to_string(cfg.idt.duration_ms) + "\n";
    out += "baseline_idt_dispersion_px = " + format_double(cfg.baseline_idt_dispersion_px) + "\n";
    out += "n_trees = " + std::to_string(cfg.forest.n_trees) + "\n";
    out += "max_depth = " + std::to_string(cfg.forest.max_depth) + "\n";
    out += "min_samples_leaf = " + std::to_string(cfg.forest.min_samples_leaf) + "\n";
    out += "features_per_split = " + std::to_string(cfg.forest.features_per_split) + "\n";
    out += std::string("bootstrap = ") + (cfg.forest.bootstrap ? "true" : "false") + "\n";
    out += std::string("class_weighting = ") + class_weighting_name(cfg.forest.class_weighting) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    return out;
}

std::map<std::string, std::string> config_echo(const PipelineConfig& cfg) {
    std::map<std::string, std::string> echo;
    echo["threshold_db_rel"] = format_double(cfg.audio.threshold_db_rel);
    echo["min_note_ms"] = std::to_string(cfg.audio.min_note_ms);
    echo["merge_gap_ms"] = std::to_string(cfg.audio.merge_gap_ms);
    echo["frame_ms"] = std::to_string(cfg.audio.frame_ms);
    echo["idt_dispersion_px"] = format_double(cfg.idt.dispersion_px);
    echo["idt_duration_ms"] = std::to_string(cfg.idt.duration_ms);
    echo["baseline_idt_dispersion_px"] = format_double(cfg.baseline_idt_dispersion_px);
    echo["n_trees"] = std::to_string(cfg.forest.n_trees);
    echo["max_depth"] = std::to_string(cfg.forest.max_depth);
    echo["min_samples_leaf"] = std::to_string(cfg.forest.min_samples_leaf);
    echo["features_per_split"] = std::to_string(cfg.forest.features_per_split);
    echo["bootstrap"] = cfg.forest.bootstrap ? "true" : "false";
    echo["class_weighting"] = class_weighting_name(cfg.forest.class_weighting);
    echo["seed"] = std::to_string(cfg.seed);
    return echo;
}

} // namespace gazenote
