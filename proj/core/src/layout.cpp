#include "gazenote/layout.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>

namespace gazenote {

const Page* PageLayout::find_page(int page_no) const {
    for (const auto& p : pages)
        if (p.page == page_no) return &p;
    return nullptr;
}

const Passage* PageLayout::find_passage(int passage_id) const {
    for (const auto& p : pages)
        for (const auto& psg : p.passages)
            if (psg.id == passage_id) return &psg;
    return nullptr;
}

std::size_t PageLayout::passage_count() const {
    std::size_t n = 0;
    for (const auto& p : pages) n += p.passages.size();
    return n;
}

std::vector<const Passage*> PageLayout::all_passages() const {
    std::vector<const Passage*> out;
    for (const auto& p : pages)
        for (const auto& psg : p.passages) out.push_back(&psg);
    std::sort(out.begin(), out.end(), [](const Passage* a, const Passage* b) {
        return std::tie(a->page, a->y, a->x, a->id) < std::tie(b->page, b->y, b->x, b->id);
    });
    return out;
}

const ScrollEvent& scroll_state_at(std::span<const ScrollEvent> scrolls, std::int64_t t_ms) {
    auto it = std::upper_bound(scrolls.begin(), scrolls.end(), t_ms,
                               [](std::int64_t t, const ScrollEvent& e) { return t < e.t_ms; });
    if (it == scrolls.begin()) return scrolls.front();
    return *(it - 1);
}

std::vector<DocGazeSample> map_gaze_to_document(std::span<const GazeSample> gaze,
                                                std::span<const ScrollEvent> scrolls,
                                                Viewport viewport) {
    std::vector<DocGazeSample> out;
    out.reserve(gaze.size());
    std::size_t scroll_idx = 0;
    for (const auto& g : gaze) {
        while (scroll_idx + 1 < scrolls.size() && scrolls[scroll_idx + 1].t_ms <= g.t_ms)
            ++scroll_idx;
        const ScrollEvent& ev = scrolls[scroll_idx];
        DocGazeSample d;
        d.t_ms = g.t_ms;
        d.page = ev.page;
        d.x = g.x;
        d.y = g.y + ev.scroll_y;
        d.on_screen = g.x >= 0 && g.x < viewport.width && g.y >= 0 && g.y < viewport.height;
        out.push_back(d);
    }
    return out;
}

std::vector<int> visible_passages(const PageLayout& layout, const ScrollEvent& scroll,
                                  Viewport viewport) {
    const Page* page = layout.find_page(scroll.page);
    if (!page) throw UnknownPage("no page " + std::to_string(scroll.page) + " in layout");
    const double top = scroll.scroll_y;
    const double bottom = scroll.scroll_y + viewport.height;
    std::vector<const Passage*> hits;
    for (const auto& psg : page->passages)
        if (psg.y < bottom && psg.y + psg.h > top) hits.push_back(&psg);
    std::sort(hits.begin(), hits.end(), [](const Passage* a, const Passage* b) {
        return std::tie(a->y, a->x, a->id) < std::tie(b->y, b->x, b->id);
    });
    std::vector<int> ids;
    ids.reserve(hits.size());
    for (const auto* p : hits) ids.push_back(p->id);
    return ids;
}

namespace {

struct Rect {
    int x0, y0, x1, y1;  // half-open
    int w() const { return x1 - x0; }
    int h() const { return y1 - y0; }
};

bool row_has_ink(const PageBitmap& bm, const Rect& r, int y) {
    for (int x = r.x0; x < r.x1; ++x)
        if (bm.at(x, y)) return true;
    return false;
}

bool col_has_ink(const PageBitmap& bm, const Rect& r, int x) {
    for (int y = r.y0; y < r.y1; ++y)
        if (bm.at(x, y)) return true;
    return false;
}

// Bands of consecutive inked rows (axis 0) or columns (axis 1), after
// removing whitespace runs >= gap. Returns the sub-rects, or an empty vector
// when no interior gap splits the rect.
std::vector<Rect> split_on_gaps(const PageBitmap& bm, const Rect& r, int axis, int gap) {
    const int lo = axis == 0 ? r.y0 : r.x0;
    const int hi = axis == 0 ? r.y1 : r.x1;
    std::vector<std::pair<int, int>> ink_runs;  // half-open [start, stop)
    int run_start = -1;
    for (int i = lo; i <= hi; ++i) {
        const bool ink = i < hi && (axis == 0 ? row_has_ink(bm, r, i) : col_has_ink(bm, r, i));
        if (ink && run_start < 0) run_start = i;
        if (!ink && run_start >= 0) {
            ink_runs.emplace_back(run_start, i);
            run_start = -1;
        }
    }
    if (ink_runs.empty()) return {};
    // merge runs separated by whitespace shorter than the gap threshold
    std::vector<std::pair<int, int>> bands{ink_runs.front()};
    for (std::size_t i = 1; i < ink_runs.size(); ++i) {
        if (ink_runs[i].first - bands.back().second < gap)
            bands.back().second = ink_runs[i].second;
        else
            bands.push_back(ink_runs[i]);
    }
    const bool trimmed = bands.front().first > lo || bands.back().second < hi;
    if (bands.size() == 1 && !trimmed) return {};
    std::vector<Rect> parts;
    parts.reserve(bands.size());
    for (auto [a, b] : bands)
        parts.push_back(axis == 0 ? Rect{r.x0, a, r.x1, b} : Rect{a, r.y0, b, r.y1});
    return parts;
}

void xy_cut(const PageBitmap& bm, const Rect& r, int axis, int gap, std::vector<Rect>& leaves) {
    if (r.w() <= 0 || r.h() <= 0) return;
    auto parts = split_on_gaps(bm, r, axis, gap);
    if (parts.empty()) parts = split_on_gaps(bm, r, 1 - axis, gap);
    if (parts.empty()) {
        leaves.push_back(r);
        return;
    }
    if (parts.size() == 1 && parts[0].w() == r.w() && parts[0].h() == r.h()) {
        leaves.push_back(r);
        return;
    }
    for (const auto& part : parts) xy_cut(bm, part, 1 - axis, gap, leaves);
}

} // namespace

std::vector<Passage> segment_page_blocks(const PageBitmap& bitmap, int gap_threshold) {
    if (bitmap.w <= 0 || bitmap.h <= 0) throw EmptyImage("bitmap has no pixels");
    std::vector<Rect> leaves;
    xy_cut(bitmap, Rect{0, 0, bitmap.w, bitmap.h}, 0, gap_threshold, leaves);
    std::vector<Passage> out;
    int next_id = 0;
    for (const auto& r : leaves) {
        // tight bounding box of the ink inside the leaf
        int minx = r.x1, maxx = r.x0 - 1, miny = r.y1, maxy = r.y0 - 1;
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x)
                if (bitmap.at(x, y)) {
                    minx = std::min(minx, x);
                    maxx = std::max(maxx, x);
                    miny = std::min(miny, y);
                    maxy = std::max(maxy, y);
                }
        if (maxx < minx) continue;  // no ink
        const int w = maxx - minx + 1;
        const int h = maxy - miny + 1;
        if (w < 4 || h < 4) continue;
        Passage p;
        p.id = next_id++;
        p.page = 1;
        p.x = minx;
        p.y = miny;
        p.w = w;
        p.h = h;
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const Passage& a, const Passage& b) {
        return std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

PageBitmap read_pbm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("missing file: " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P4") throw ParseError(path.string(), 1, "not a P4 PBM file");
    int w = 0, h = 0;
    // skip whitespace and comment lines between tokens
    auto next_int = [&](int& v) {
        while (true) {
            int c = in.peek();
            if (c == '#') {
                std::string comment;
                std::getline(in, comment);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        if (!(in >> v)) throw ParseError(path.string(), 1, "bad PBM dimensions");
    };
    next_int(w);
    next_int(h);
    in.get();  // single whitespace before raster
    if (w <= 0 || h <= 0) throw EmptyImage("PBM has no pixels: " + path.string());
    PageBitmap bm;
    bm.w = w;
    bm.h = h;
    bm.ink.assign(static_cast<std::size_t>(w) * h, 0);
    const int row_bytes = (w + 7) / 8;
    std::vector<char> row(row_bytes);
    for (int y = 0; y < h; ++y) {
        in.read(row.data(), row_bytes);
        if (in.gcount() != row_bytes) throw ParseError(path.string(), 1, "truncated PBM raster");
        for (int x = 0; x < w; ++x) {
            const unsigned byte = static_cast<unsigned char>(row[x / 8]);
            bm.ink[static_cast<std::size_t>(y) * w + x] = (byte >> (7 - x % 8)) & 1u;
        }
    }
    return bm;
}

void write_pbm(const std::filesystem::path& path, const PageBitmap& bitmap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << "P4\n" << bitmap.w << " " << bitmap.h << "\n";
    const int row_bytes = (bitmap.w + 7) / 8;
    std::vector<char> row(row_bytes);
    for (int y = 0; y < bitmap.h; ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (int x = 0; x < bitmap.w; ++x)
            if (bitmap.at(x, y)) row[x / 8] |= static_cast<char>(0x80u >> (x % 8));
        out.write(row.data(), row_bytes);
    }
}

PageLayout layout_from_json(const std::string& text, const std::string& source_name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source_name, 1, e.what());
    }
    PageLayout layout;
    try {
        for (const auto& jp : j.at("pages")) {
            Page page;
            page.page = jp.at("page").get<int>();
            page.w = jp.at("w").get<double>();
            page.h = jp.at("h").get<double>();
            for (const auto& jpsg : jp.at("passages")) {
                Passage psg;
                psg.id = jpsg.at("id").get<int>();
                psg.page = page.page;
                psg.x = jpsg.at("x").get<double>();
                psg.y = jpsg.at("y").get<double>();
                psg.w = jpsg.at("w").get<double>();
                psg.h = jpsg.at("h").get<double>();
                page.passages.push_back(psg);
            }
            layout.pages.push_back(std::move(page));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source_name, 1, e.what());
    }
    // structural invariants
    std::set<int> ids;
    for (const auto& page : layout.pages) {
        if (page.page < 1) throw ValidationError(source_name + ": page index must be >= 1");
        if (page.w <= 0 || page.h <= 0)
            throw ValidationError(source_name + ": page dimensions must be positive");
        for (const auto& psg : page.passages) {
            if (psg.w <= 0 || psg.h <= 0)
                throw ValidationError(source_name + ": passage " + std::to_string(psg.id) +
                                      " has non-positive size");
            if (psg.x < 0 || psg.y < 0 || psg.x + psg.w > page.w || psg.y + psg.h > page.h)
                throw ValidationError(source_name + ": passage " + std::to_string(psg.id) +
                                      " exceeds its page rectangle");
            if (!ids.insert(psg.id).second)
                throw ValidationError(source_name + ": duplicate passage id " +
                                      std::to_string(psg.id));
        }
        for (std::size_t a = 0; a < page.passages.size(); ++a)
            for (std::size_t b = a + 1; b < page.passages.size(); ++b) {
                const Passage& p = page.passages[a];
                const Passage& q = page.passages[b];
                const bool overlap = p.x < q.x + q.w && q.x < p.x + p.w && p.y < q.y + q.h &&
                                     q.y < p.y + p.h;
                if (overlap)
                    throw ValidationError(source_name + ": passages " + std::to_string(p.id) +
                                          " and " + std::to_string(q.id) + " overlap");
            }
    }
    return layout;
}

std::string layout_to_json(const PageLayout& layout) {
    nlohmann::json j;
    j["pages"] = nlohmann::json::array();
    for (const auto& page : layout.pages) {
        nlohmann::json jp;
        jp["page"] = page.page;
        jp["w"] = page.w;
        jp["h"] = page.h;
        jp["passages"] = nlohmann::json::array();
        for (const auto& psg : page.passages) {
            nlohmann::json jpsg;
            jpsg["id"] = psg.id;
            jpsg["x"] = psg.x;
            jpsg["y"] = psg.y;
            jpsg["w"] = psg.w;
            jpsg["h"] = psg.h;
            jp["passages"].push_back(jpsg);
        }
        j["pages"].push_back(jp);
    }
    return j.dump(2) + "\n";
}

PageLayout load_layout(const std::filesystem::path& path) {
    return layout_from_json(read_text_file(path), path.string());
}

bool operator==(const Passage& a, const Passage& b) {
    return a.id == b.id && a.page == b.page && a.x == b.x && a.y == b.y && a.w == b.w &&
           a.h == b.h;
}

bool operator==(const Page& a, const Page& b) {
    return a.page == b.page && a.w == b.w && a.h == b.h && a.passages == b.passages;
}

bool operator==(const PageLayout& a, const PageLayout& b) { return a.pages == b.pages; }

} // namespace gazenote
