#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gazenote {

/// Axis-aligned paragraph rectangle in document coordinates. y runs down
/// from the page top; passages on one page never overlap.
struct Passage {
    int id = 0;
    int page = 1;       // 1-based
    double x = 0, y = 0, w = 0, h = 0;

    double area() const { return w * h; }
    bool contains(double px, double py) const {
        return px >= x && px <= x + w && py >= y && py <= y + h;
    }
};

struct Page {
    int page = 1;       // 1-based
    double w = 0, h = 0;
    std::vector<Passage> passages;
};

struct PageLayout {
    std::vector<Page> pages;

    const Page* find_page(int page_no) const;
    const Passage* find_passage(int passage_id) const;
    std::size_t passage_count() const;
    std::vector<const Passage*> all_passages() const;   // (page, y, x, id) order
};

struct Viewport {
    int width = 0;
    int height = 0;
};

struct GazeSample {
    std::int64_t t_ms = 0;
    double x = 0, y = 0;    // screen pixels
};

struct ScrollEvent {
    std::int64_t t_ms = 0;
    int page = 1;           // 1-based
    double scroll_y = 0;    // document-pixel offset of the viewport top
};

/// Gaze sample replayed into document space using the scroll state active at
/// its timestamp.
struct DocGazeSample {
    std::int64_t t_ms = 0;
    int page = 1;
    double x = 0, y = 0;    // document pixels
    bool on_screen = true;
};

/// Latest scroll event with t <= t_ms. Events must be sorted and non-empty
/// (session loading guarantees a t=0 event).
const ScrollEvent& scroll_state_at(std::span<const ScrollEvent> scrolls, std::int64_t t_ms);

/// Replays scrolling over the gaze stream: doc_y = screen_y + scroll_y,
/// doc_x = screen_x, page from the active scroll event. Samples outside the
/// viewport rectangle are flagged off-screen. Output preserves count and
/// timestamps.
std::vector<DocGazeSample> map_gaze_to_document(std::span<const GazeSample> gaze,
                                                std::span<const ScrollEvent> scrolls,
                                                Viewport viewport);

/// Passages on scroll.page whose vertical extent overlaps the viewport band
/// [scroll_y, scroll_y + viewport.height), topmost first (ties by x, then id).
/// Throws UnknownPage if the page is not in the layout.
std::vector<int> visible_passages(const PageLayout& layout, const ScrollEvent& scroll,
                                  Viewport viewport);

/// 1-bit page image; ink[y*w + x] != 0 means an ink pixel.
struct PageBitmap {
    int w = 0, h = 0;
    std::vector<std::uint8_t> ink;

    bool at(int x, int y) const { return ink[static_cast<std::size_t>(y) * w + x] != 0; }
};

/// Recursive XY-cut: alternately split on horizontal / vertical whitespace
/// runs of at least gap_threshold pixels; each leaf becomes the tight
/// bounding box of its ink. Boxes narrower or shorter than 4 px are dropped.
/// Throws EmptyImage on a 0x0 bitmap.
std::vector<Passage> segment_page_blocks(const PageBitmap& bitmap, int gap_threshold);

PageBitmap read_pbm(const std::filesystem::path& path);
void write_pbm(const std::filesystem::path& path, const PageBitmap& bitmap);

PageLayout layout_from_json(const std::string& text, const std::string& source_name = "layout.json");
std::string layout_to_json(const PageLayout& layout);
PageLayout load_layout(const std::filesystem::path& path);

bool operator==(const Passage&, const Passage&);
bool operator==(const Page&, const Page&);
bool operator==(const PageLayout&, const PageLayout&);

} // namespace gazenote
