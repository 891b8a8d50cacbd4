#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>

namespace bbbd {

// Axis-aligned pixel rectangle with inclusive integer bounds: the pixel at
// column x_max / row y_max is inside the box, so a one-pixel box has
// x_min == x_max. A default-constructed BBox is the canonical empty box.
struct BBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = -1;
    int y_max = -1;

    constexpr BBox() = default;

    constexpr BBox(int x0, int y0, int x1, int y1)
        : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
        assert(x0 <= x1 && y0 <= y1);
    }

    static constexpr BBox empty() { return BBox{}; }

    [[nodiscard]] constexpr bool is_empty() const {
        return x_min > x_max || y_min > y_max;
    }

    [[nodiscard]] constexpr int width() const {
        return is_empty() ? 0 : x_max - x_min + 1;
    }

    [[nodiscard]] constexpr int height() const {
        return is_empty() ? 0 : y_max - y_min + 1;
    }

    [[nodiscard]] constexpr long long area() const {
        return static_cast<long long>(width()) * height();
    }

    [[nodiscard]] constexpr bool contains_point(int x, int y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    // All empty boxes compare equal regardless of representation.
    friend constexpr bool operator==(const BBox& a, const BBox& b) {
        if (a.is_empty() || b.is_empty()) return a.is_empty() && b.is_empty();
        return a.x_min == b.x_min && a.y_min == b.y_min &&
               a.x_max == b.x_max && a.y_max == b.y_max;
    }
};

// Largest rectangle contained in both. Empty iff the boxes share no pixel;
// with inclusive bounds, boxes touching along a shared pixel column or row
// do intersect, boxes one or more pixels apart do not.
[[nodiscard]] constexpr BBox intersection(const BBox& a, const BBox& b) {
    if (a.is_empty() || b.is_empty()) return BBox::empty();
    const int x0 = std::max(a.x_min, b.x_min);
    const int y0 = std::max(a.y_min, b.y_min);
    const int x1 = std::min(a.x_max, b.x_max);
    const int y1 = std::min(a.y_max, b.y_max);
    if (x0 > x1 || y0 > y1) return BBox::empty();
    return BBox{x0, y0, x1, y1};
}

// True iff every pixel of inner lies in outer. A box contains itself, and
// the empty box is vacuously contained in anything.
[[nodiscard]] constexpr bool contains(const BBox& outer, const BBox& inner) {
    if (inner.is_empty()) return true;
    if (outer.is_empty()) return false;
    return inner.x_min >= outer.x_min && inner.x_max <= outer.x_max &&
           inner.y_min >= outer.y_min && inner.y_max <= outer.y_max;
}

// Converts a fractional box (continuous coordinates, exclusive maxima) to
// inclusive pixel bounds: floor the minima, ceil the maxima minus one, then
// clamp to the image. Returns the empty box when nothing remains.
[[nodiscard]] inline BBox box_from_fractional(double x0, double y0, double x1, double y1,
                                              int image_width, int image_height) {
    int ix0 = static_cast<int>(std::floor(x0));
    int iy0 = static_cast<int>(std::floor(y0));
    int ix1 = static_cast<int>(std::ceil(x1)) - 1;
    int iy1 = static_cast<int>(std::ceil(y1)) - 1;
    ix0 = std::max(ix0, 0);
    iy0 = std::max(iy0, 0);
    ix1 = std::min(ix1, image_width - 1);
    iy1 = std::min(iy1, image_height - 1);
    if (ix0 > ix1 || iy0 > iy1) return BBox::empty();
    return BBox{ix0, iy0, ix1, iy1};
}

} // namespace bbbd
