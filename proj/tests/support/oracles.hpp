// Independent reference implementations used as test oracles. These are
// deliberately written along different routes than the production code
// (binary search + from-scratch scans, all-pairs counting, pointer trees)
// so agreement actually checks something.

#pragma once

#include "gazenote/features.hpp"
#include "gazenote/fixations.hpp"
#include "gazenote/forest.hpp"
#include "gazenote/layout.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <vector>

namespace gazenote::testing {

// ---------------------------------------------------------------------------
// I-DT reference: for each window start, the maximal admissible end index is
// located by binary search over the (monotone) dispersion, recomputed from
// scratch at every probe.
// ---------------------------------------------------------------------------

inline double window_dispersion(const std::vector<DocGazeSample>& s, std::size_t i,
                                std::size_t j) {
    double min_x = s[i].x, max_x = s[i].x, min_y = s[i].y, max_y = s[i].y;
    for (std::size_t k = i + 1; k <= j; ++k) {
        min_x = std::min(min_x, s[k].x);
        max_x = std::max(max_x, s[k].x);
        min_y = std::min(min_y, s[k].y);
        max_y = std::max(max_y, s[k].y);
    }
    return (max_x - min_x) + (max_y - min_y);
}

inline std::vector<Fixation> reference_idt(const std::vector<DocGazeSample>& s,
                                           const IdtConfig& cfg) {
    std::vector<Fixation> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t page_end = i;  // last index of the same-page run
        while (page_end + 1 < s.size() && s[page_end + 1].page == s[i].page) ++page_end;

        std::size_t lo = i, hi = page_end;  // maximal j with dispersion within threshold
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo + 1) / 2;
            if (window_dispersion(s, i, mid) <= cfg.dispersion_px)
                lo = mid;
            else
                hi = mid - 1;
        }
        const std::size_t j = lo;
        if (s[j].t_ms - s[i].t_ms >= cfg.duration_ms) {
            Fixation f;
            f.start_ms = s[i].t_ms;
            f.end_ms = s[j].t_ms;
            f.page = s[i].page;
            double sx = 0, sy = 0;
            for (std::size_t k = i; k <= j; ++k) {
                sx += s[k].x;
                sy += s[k].y;
            }
            f.cx = sx / static_cast<double>(j - i + 1);
            f.cy = sy / static_cast<double>(j - i + 1);
            out.push_back(f);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// AUC reference: plain all-pairs Mann-Whitney count with ties worth 1/2.
// ---------------------------------------------------------------------------

inline double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
    double wins = 0;
    std::size_t pairs = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        if (truth[p] == 0) continue;
        for (std::size_t n = 0; n < scores.size(); ++n) {
            if (truth[n] != 0) continue;
            ++pairs;
            if (scores[p] > scores[n])
                wins += 1.0;
            else if (scores[p] == scores[n])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// Feature reference: per passage, each statistic is computed in its own pass
// over the filtered events, and the temporal order is derived from an
// explicit sorted list of fixation times.
// ---------------------------------------------------------------------------

inline std::vector<PassageFeatureVector> reference_features(
    const RegionOfAnalysis& roa, const VoiceNote& note, const std::vector<Fixation>& fixations,
    const std::vector<Saccade>& saccades, const std::vector<int>& candidates,
    const PageLayout& layout) {
    // temporal order deltas
    std::map<int, double> delta;
    for (int id : candidates) {
        std::vector<double> times;
        for (const auto& f : fixations)
            if (f.passage_id == id) times.push_back(static_cast<double>(f.start_ms));
        std::sort(times.begin(), times.end());
        if (times.empty()) continue;
        const std::size_t take = std::min<std::size_t>(5, times.size());
        double sum = 0;
        for (std::size_t k = 0; k < take; ++k) sum += times[k];
        delta[id] = static_cast<double>(note.start_ms) - sum / static_cast<double>(take);
    }
    double dmin = 0, dmax = 0;
    if (!delta.empty()) {
        dmin = dmax = delta.begin()->second;
        for (const auto& [id, d] : delta) {
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
    }

    std::vector<PassageFeatureVector> out;
    for (int id : candidates) {
        const Passage* psg = layout.find_passage(id);
        PassageFeatureVector v;
        v.note_id = roa.note_id;
        v.passage_id = id;

        std::vector<double> fd;
        for (const auto& f : fixations)
            if (f.passage_id == id) fd.push_back(static_cast<double>(f.end_ms - f.start_ms));
        std::vector<double> sl, sd, sv;
        for (const auto& s : saccades)
            if (s.passage_id == id) {
                sl.push_back(s.length_px);
                sd.push_back(static_cast<double>(s.duration_ms));
                sv.push_back(s.velocity);
            }
        auto vmax = [](const std::vector<double>& v) {
            double m = 0;
            for (double x : v) m = std::max(m, x);
            return m;
        };
        auto vmin = [](const std::vector<double>& v) {
            if (v.empty()) return 0.0;
            double m = v[0];
            for (double x : v) m = std::min(m, x);
            return m;
        };
        auto vavg = [](const std::vector<double>& v) {
            if (v.empty()) return 0.0;
            double s = 0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        const double area = psg->w * psg->h;
        v.f[0] = static_cast<double>(fd.size()) / area;
        v.f[1] = vmax(fd);
        v.f[2] = vmin(fd);
        v.f[3] = vavg(fd);
        v.f[4] = vmax(sl);
        v.f[5] = vmin(sl);
        v.f[6] = vavg(sl);
        v.f[7] = vmax(sd);
        v.f[8] = vmin(sd);
        v.f[9] = vavg(sd);
        v.f[10] = vmax(sv);
        v.f[11] = vmin(sv);
        v.f[12] = vavg(sv);
        double total = 0;
        for (double d : fd) total += d;
        v.f[13] = total / area;
        if (delta.find(id) == delta.end())
            v.f[14] = 1.0;
        else if (dmax > dmin)
            v.f[14] = (delta[id] - dmin) / (dmax - dmin);
        else
            v.f[14] = 0.0;
        out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Single-CART reference: pointer-based recursive tree with exhaustive split
// search over all 15 features, same growing rules as the production forest
// (weighted Gini, midpoint thresholds, ties to the lowest feature index then
// lowest threshold, zero-gain splits allowed while the node is impure).
// ---------------------------------------------------------------------------

struct RefNode {
    int feature = -1;
    double threshold = 0;
    std::unique_ptr<RefNode> left, right;
    double n0 = 0, n1 = 0;
};

class ReferenceCart {
public:
    ReferenceCart(const TrainingSet& data, int max_depth, int min_samples_leaf,
                  bool balanced)
        : max_depth_(max_depth), min_leaf_(min_samples_leaf) {
        std::size_t c0 = 0, c1 = 0;
        for (int y : data.y) (y == 0 ? c0 : c1)++;
        if (balanced) {
            w0_ = c0 > 0 ? static_cast<double>(data.y.size()) / (2.0 * c0) : 0.0;
            w1_ = c1 > 0 ? static_cast<double>(data.y.size()) / (2.0 * c1) : 0.0;
        }
        std::vector<std::size_t> rows(data.x.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        root_ = grow(data, rows, 0);
    }

    double proba(const std::array<double, kFeatureCount>& x) const {
        const RefNode* node = root_.get();
        while (node->feature >= 0)
            node = x[node->feature] <= node->threshold ? node->left.get() : node->right.get();
        const double pos = w1_ * node->n1;
        const double total = w0_ * node->n0 + pos;
        return total > 0 ? pos / total : 0.5;
    }

private:
    double impurity(double c0, double c1) const {
        const double a = w0_ * c0, b = w1_ * c1;
        const double t = a + b;
        if (t <= 0) return 0;
        return 1.0 - (a / t) * (a / t) - (b / t) * (b / t);
    }

    std::unique_ptr<RefNode> grow(const TrainingSet& data, const std::vector<std::size_t>& rows,
                                  int depth) {
        auto node = std::make_unique<RefNode>();
        for (std::size_t r : rows) (data.y[r] == 0 ? node->n0 : node->n1) += 1.0;
        const bool pure = node->n0 == 0 || node->n1 == 0;
        if (pure || (max_depth_ > 0 && depth >= max_depth_) ||
            rows.size() < 2 * static_cast<std::size_t>(min_leaf_))
            return node;

        const double parent_cost =
            (w0_ * node->n0 + w1_ * node->n1) * impurity(node->n0, node->n1);
        bool found = false;
        int best_f = 0;
        double best_thr = 0, best_gain = 0;
        for (int f = 0; f < static_cast<int>(kFeatureCount); ++f) {
            std::vector<double> values;
            for (std::size_t r : rows) values.push_back(data.x[r][f]);
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t v = 0; v + 1 < values.size(); ++v) {
                const double thr = (values[v] + values[v + 1]) / 2.0;
                double l0 = 0, l1 = 0;
                std::size_t ln = 0;
                for (std::size_t r : rows)
                    if (data.x[r][f] <= thr) {
                        (data.y[r] == 0 ? l0 : l1) += 1.0;
                        ++ln;
                    }
                const std::size_t rn = rows.size() - ln;
                if (ln < static_cast<std::size_t>(min_leaf_) ||
                    rn < static_cast<std::size_t>(min_leaf_))
                    continue;
                const double r0 = node->n0 - l0, r1 = node->n1 - l1;
                const double cost = (w0_ * l0 + w1_ * l1) * impurity(l0, l1) +
                                    (w0_ * r0 + w1_ * r1) * impurity(r0, r1);
                const double gain = parent_cost - cost;
                if (!found || gain > best_gain) {
                    found = true;
                    best_f = f;
                    best_thr = thr;
                    best_gain = gain;
                }
            }
        }
        if (!found) return node;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows)
            (data.x[r][best_f] <= best_thr ? left_rows : right_rows).push_back(r);
        node->feature = best_f;
        node->threshold = best_thr;
        node->left = grow(data, left_rows, depth + 1);
        node->right = grow(data, right_rows, depth + 1);
        return node;
    }

    int max_depth_;
    int min_leaf_;
    double w0_ = 1.0, w1_ = 1.0;
    std::unique_ptr<RefNode> root_;
};

// ---------------------------------------------------------------------------
// Connected ink regions (4-connectivity) with bounding boxes, used to verify
// XY-cut output on constructed bitmaps.
// ---------------------------------------------------------------------------

struct InkBox {
    int x0, y0, x1, y1;  // inclusive
};

inline std::vector<InkBox> connected_ink_boxes(const PageBitmap& bm) {
    std::vector<char> seen(static_cast<std::size_t>(bm.w) * bm.h, 0);
    std::vector<InkBox> boxes;
    for (int y = 0; y < bm.h; ++y)
        for (int x = 0; x < bm.w; ++x) {
            const std::size_t at = static_cast<std::size_t>(y) * bm.w + x;
            if (!bm.at(x, y) || seen[at]) continue;
            InkBox box{x, y, x, y};
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[at] = 1;
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                box.x0 = std::min(box.x0, cx);
                box.x1 = std::max(box.x1, cx);
                box.y0 = std::min(box.y0, cy);
                box.y1 = std::max(box.y1, cy);
                const int dx[] = {1, -1, 0, 0};
                const int dy[] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int nx = cx + dx[d], ny = cy + dy[d];
                    if (nx < 0 || ny < 0 || nx >= bm.w || ny >= bm.h) continue;
                    const std::size_t nat = static_cast<std::size_t>(ny) * bm.w + nx;
                    if (bm.at(nx, ny) && !seen[nat]) {
                        seen[nat] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
            boxes.push_back(box);
        }
    std::sort(boxes.begin(), boxes.end(), [](const InkBox& a, const InkBox& b) {
        return std::tie(a.y0, a.x0) < std::tie(b.y0, b.x0);
    });
    return boxes;
}

} // namespace gazenote::testing
