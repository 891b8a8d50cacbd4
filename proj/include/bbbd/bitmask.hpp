#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "bbbd/box.hpp"
#include "bbbd/errors.hpp"

namespace bbbd {

// Binary raster of one instance's visible mask. Row-major, one byte per
// pixel, values strictly 0 or 1.
class Bitmask {
public:
    Bitmask() = default;

    Bitmask(int width, int height)
        : width_(width), height_(height),
          bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {
        assert(width >= 0 && height >= 0);
    }

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] std::size_t pixel_count() const { return bits_.size(); }

    [[nodiscard]] bool at(int x, int y) const {
        assert(in_extent(x, y));
        return bits_[index(x, y)] != 0;
    }

    void set(int x, int y, bool value = true) {
        assert(in_extent(x, y));
        bits_[index(x, y)] = value ? 1 : 0;
    }

    [[nodiscard]] bool in_extent(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    [[nodiscard]] bool same_extent(const Bitmask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    // Number of set pixels over the full extent.
    [[nodiscard]] std::size_t population() const {
        return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
    }

    [[nodiscard]] BBox extent_box() const {
        if (width_ == 0 || height_ == 0) return BBox::empty();
        return BBox{0, 0, width_ - 1, height_ - 1};
    }

    Bitmask& operator|=(const Bitmask& other) {
        require_same_extent(other, "operator|=");
        for (std::size_t i = 0; i < bits_.size(); ++i)
            bits_[i] = static_cast<std::uint8_t>(bits_[i] | other.bits_[i]);
        return *this;
    }

    friend bool operator==(const Bitmask& a, const Bitmask& b) = default;

    void require_same_extent(const Bitmask& other, const char* what) const {
        if (!same_extent(other))
            throw ExtentMismatch(std::string(what) + ": mask extents differ");
    }

    [[nodiscard]] const std::vector<std::uint8_t>& raw() const { return bits_; }

private:
    [[nodiscard]] std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Pixels of a set in b but not in a. Used by the painter-style renderer.
[[nodiscard]] inline Bitmask difference(const Bitmask& a, const Bitmask& b) {
    a.require_same_extent(b, "difference");
    Bitmask out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            if (a.at(x, y) && !b.at(x, y)) out.set(x, y);
    return out;
}

// Number of set pixels of m whose coordinates lie in r. The window is
// clamped to the mask extent; the empty window counts zero.
[[nodiscard]] inline std::size_t count_in(const Bitmask& m, const BBox& r) {
    const BBox w = intersection(r, m.extent_box());
    if (w.is_empty()) return 0;
    std::size_t total = 0;
    for (int y = w.y_min; y <= w.y_max; ++y)
        for (int x = w.x_min; x <= w.x_max; ++x)
            total += m.at(x, y) ? 1 : 0;
    return total;
}

// Copies the window r (clamped to the extent) into a raster of its own size.
[[nodiscard]] inline Bitmask crop(const Bitmask& m, const BBox& r) {
    const BBox w = intersection(r, m.extent_box());
    if (w.is_empty()) return Bitmask{};
    Bitmask out(w.width(), w.height());
    for (int y = w.y_min; y <= w.y_max; ++y)
        for (int x = w.x_min; x <= w.x_max; ++x)
            if (m.at(x, y)) out.set(x - w.x_min, y - w.y_min);
    return out;
}

// 8-neighbourhood dilation: a pixel is set iff it or any of its 8 neighbours
// is set in m. Clamps at the raster border, no wraparound.
[[nodiscard]] inline Bitmask dilate8(const Bitmask& m) {
    Bitmask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y)) continue;
            const int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, m.width() - 1);
            const int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, m.height() - 1);
            for (int ny = y0; ny <= y1; ++ny)
                for (int nx = x0; nx <= x1; ++nx)
                    out.set(nx, ny);
        }
    }
    return out;
}

// True iff some pixel is set in both masks.
[[nodiscard]] inline bool masks_intersect(const Bitmask& a, const Bitmask& b) {
    a.require_same_extent(b, "masks_intersect");
    const auto& ra = a.raw();
    const auto& rb = b.raw();
    for (std::size_t i = 0; i < ra.size(); ++i)
        if (ra[i] & rb[i]) return true;
    return false;
}

[[nodiscard]] inline std::size_t intersection_population(const Bitmask& a, const Bitmask& b) {
    a.require_same_extent(b, "intersection_population");
    const auto& ra = a.raw();
    const auto& rb = b.raw();
    std::size_t total = 0;
    for (std::size_t i = 0; i < ra.size(); ++i)
        total += static_cast<std::size_t>(ra[i] & rb[i]);
    return total;
}

// Smallest box covering all set pixels; empty for the empty mask.
[[nodiscard]] inline BBox tight_bbox(const Bitmask& m) {
    int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return BBox::empty();
    return BBox{x0, y0, x1, y1};
}

} // namespace bbbd
