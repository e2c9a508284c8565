#pragma once

#include "gazenote/audio.hpp"
#include "gazenote/fixations.hpp"
#include "gazenote/forest.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace gazenote {

/// All pipeline knobs in one place. File format: flat `key = value` lines,
/// '#' comments; absent keys keep their defaults, unknown keys are rejected.
struct PipelineConfig {
    AudioConfig audio;
    IdtConfig idt;                          // dispersion 25 px / duration 100 ms
    double baseline_idt_dispersion_px = 20; // fixation baseline uses 20 / 100
    ForestConfig forest;
    std::uint64_t seed = 0;

    IdtConfig baseline_idt() const { return {baseline_idt_dispersion_px, idt.duration_ms}; }
};

PipelineConfig parse_config(const std::string& text, const std::string& source_name);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_text(const PipelineConfig& cfg);

/// Flat key/value echo of the effective configuration (for report.json).
std::map<std::string, std::string> config_echo(const PipelineConfig& cfg);

} // namespace gazenote
