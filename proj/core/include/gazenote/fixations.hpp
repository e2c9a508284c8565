#pragma once

#include "gazenote/layout.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gazenote {

struct Fixation {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    double cx = 0, cy = 0;      // centroid, document pixels
    int page = 1;
    int passage_id = -1;        // filled by assign_to_passages
};

/// Movement between two consecutive fixations, attributed to the landing
/// fixation's passage.
struct Saccade {
    int from_fix = 0;
    int to_fix = 0;
    double length_px = 0;           // Euclidean between centroids
    std::int64_t duration_ms = 1;   // gap between fixations, clamped to >= 1
    double velocity = 0;            // length / duration
    int passage_id = -1;
};

struct IdtConfig {
    double dispersion_px = 25.0;    // max (dx + dy) spread inside a fixation
    std::int64_t duration_ms = 100; // min fixation span
};

/// Drops off-screen samples, preserving order.
std::vector<DocGazeSample> remove_outliers(std::span<const DocGazeSample> samples);

/// Dispersion-threshold identification: grows a window while the spread
/// (max x - min x) + (max y - min y) stays within cfg.dispersion_px, emits a
/// fixation when the window spans at least cfg.duration_ms, otherwise slides
/// forward one sample. A page change always terminates the window.
std::vector<Fixation> detect_fixations(std::span<const DocGazeSample> samples,
                                       const IdtConfig& cfg);

/// n fixations -> n-1 saccades connecting consecutive centroids.
std::vector<Saccade> extract_saccades(std::span<const Fixation> fixations);

/// Euclidean distance from a point to a rectangle (0 when inside).
double point_rect_distance(double px, double py, const Passage& rect);

/// Fills passage_id: containment wins, otherwise the nearest rectangle on
/// the same page; exact distance ties go to the lowest passage id. Throws
/// NoPassagesOnPage when a fixation's page has no passages.
std::vector<Fixation> assign_to_passages(std::vector<Fixation> fixations,
                                         const PageLayout& layout);

void write_fixations_csv(const std::filesystem::path& path, std::span<const Fixation> fixations);

} // namespace gazenote
