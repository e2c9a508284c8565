#include "gazenote/fixations.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gazenote {

std::vector<DocGazeSample> remove_outliers(std::span<const DocGazeSample> samples) {
    std::vector<DocGazeSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples)
        if (s.on_screen) out.push_back(s);
    return out;
}

std::vector<Fixation> detect_fixations(std::span<const DocGazeSample> samples,
                                       const IdtConfig& cfg) {
    std::vector<Fixation> out;
    const std::size_t n = samples.size();
    std::size_t i = 0;
    while (i < n) {
        // grow [i..j] while the dispersion stays within threshold and the
        // page does not change
        std::size_t j = i;
        double min_x = samples[i].x, max_x = samples[i].x;
        double min_y = samples[i].y, max_y = samples[i].y;
        while (j + 1 < n && samples[j + 1].page == samples[i].page) {
            const double nmin_x = std::min(min_x, samples[j + 1].x);
            const double nmax_x = std::max(max_x, samples[j + 1].x);
            const double nmin_y = std::min(min_y, samples[j + 1].y);
            const double nmax_y = std::max(max_y, samples[j + 1].y);
            if ((nmax_x - nmin_x) + (nmax_y - nmin_y) > cfg.dispersion_px) break;
            min_x = nmin_x;
            max_x = nmax_x;
            min_y = nmin_y;
            max_y = nmax_y;
            ++j;
        }
        if (samples[j].t_ms - samples[i].t_ms >= cfg.duration_ms) {
            Fixation f;
            f.start_ms = samples[i].t_ms;
            f.end_ms = samples[j].t_ms;
            f.page = samples[i].page;
            double sum_x = 0, sum_y = 0;
            for (std::size_t k = i; k <= j; ++k) {
                sum_x += samples[k].x;
                sum_y += samples[k].y;
            }
            const double count = static_cast<double>(j - i + 1);
            f.cx = sum_x / count;
            f.cy = sum_y / count;
            out.push_back(f);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<Saccade> extract_saccades(std::span<const Fixation> fixations) {
    std::vector<Saccade> out;
    if (fixations.size() < 2) return out;
    out.reserve(fixations.size() - 1);
    for (std::size_t i = 1; i < fixations.size(); ++i) {
        const Fixation& a = fixations[i - 1];
        const Fixation& b = fixations[i];
        Saccade s;
        s.from_fix = static_cast<int>(i - 1);
        s.to_fix = static_cast<int>(i);
        s.length_px = std::hypot(b.cx - a.cx, b.cy - a.cy);
        s.duration_ms = std::max<std::int64_t>(1, b.start_ms - a.end_ms);
        s.velocity = s.length_px / static_cast<double>(s.duration_ms);
        s.passage_id = b.passage_id;
        out.push_back(s);
    }
    return out;
}

double point_rect_distance(double px, double py, const Passage& rect) {
    const double dx = std::max({rect.x - px, 0.0, px - (rect.x + rect.w)});
    const double dy = std::max({rect.y - py, 0.0, py - (rect.y + rect.h)});
    return std::hypot(dx, dy);
}

std::vector<Fixation> assign_to_passages(std::vector<Fixation> fixations,
                                         const PageLayout& layout) {
    for (auto& f : fixations) {
        const Page* page = layout.find_page(f.page);
        if (!page || page->passages.empty())
            throw NoPassagesOnPage("no passages on page " + std::to_string(f.page));
        double best_dist = std::numeric_limits<double>::infinity();
        int best_id = -1;
        for (const auto& psg : page->passages) {
            const double d = point_rect_distance(f.cx, f.cy, psg);
            if (d < best_dist || (d == best_dist && psg.id < best_id)) {
                best_dist = d;
                best_id = psg.id;
            }
        }
        f.passage_id = best_id;
    }
    return fixations;
}

void write_fixations_csv(const std::filesystem::path& path,
                         std::span<const Fixation> fixations) {
    std::string out = "start_ms,end_ms,cx,cy,page,passage_id\n";
    for (const auto& f : fixations)
        out += std::to_string(f.start_ms) + "," + std::to_string(f.end_ms) + "," +
               format_double(f.cx) + "," + format_double(f.cy) + "," + std::to_string(f.page) +
               "," + std::to_string(f.passage_id) + "\n";
    write_text_file(path, out);
}

} // namespace gazenote
