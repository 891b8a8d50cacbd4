#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "bbbd/bitmask.hpp"
#include "bbbd/errors.hpp"

namespace bbbd {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

namespace detail {

// Crossing of edge (p, q) with the horizontal line at yc, or no value when
// the edge does not straddle it. The straddle test is half-open, so a vertex
// sitting exactly on the line is counted once, not twice. The expression is
// anchored at the lower-y endpoint so both traversal directions of an edge
// produce the identical double; the per-pixel oracle form of the even-odd
// rule evaluates the same expression and therefore agrees bit for bit.
inline bool edge_crossing(const Vec2& p, const Vec2& q, double yc, double& x_out) {
    if ((p.y > yc) == (q.y > yc)) return false;
    const Vec2& lo = (p.y < q.y) ? p : q;
    const Vec2& hi = (p.y < q.y) ? q : p;
    x_out = lo.x + (hi.x - lo.x) * (yc - lo.y) / (hi.y - lo.y);
    return true;
}

} // namespace detail

// Scanline even-odd fill: a pixel is set iff its center (x+0.5, y+0.5) lies
// inside the polygon, i.e. an odd number of edge crossings sit strictly to
// its right. Output is clipped to the raster extent; vertices may be
// fractional and may lie outside it.
[[nodiscard]] inline Bitmask rasterize_polygon(std::span<const Vec2> points,
                                               int width, int height) {
    if (points.size() < 3)
        throw DegeneratePolygon("rasterize_polygon: need at least 3 vertices, got " +
                                std::to_string(points.size()));

    Bitmask out(width, height);
    std::vector<double> crossings;
    crossings.reserve(points.size());

    for (int y = 0; y < height; ++y) {
        const double yc = y + 0.5;
        crossings.clear();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const Vec2& p = points[i];
            const Vec2& q = points[(i + 1) % points.size()];
            double cx;
            if (detail::edge_crossing(p, q, yc, cx)) crossings.push_back(cx);
        }
        if (crossings.empty()) continue;
        std::sort(crossings.begin(), crossings.end());

        // Pixel centers advance monotonically, so one pointer sweep over the
        // sorted crossings classifies the whole row.
        std::size_t idx = 0;
        for (int x = 0; x < width; ++x) {
            const double px = x + 0.5;
            while (idx < crossings.size() && crossings[idx] <= px) ++idx;
            if ((crossings.size() - idx) & 1u) out.set(x, y);
        }
    }
    return out;
}

// Convenience overload for flat [x0, y0, x1, y1, ...] coordinate lists.
[[nodiscard]] inline Bitmask rasterize_polygon(std::span<const double> flat_xy,
                                               int width, int height) {
    if (flat_xy.size() % 2 != 0)
        throw DegeneratePolygon("rasterize_polygon: odd coordinate count");
    std::vector<Vec2> points(flat_xy.size() / 2);
    for (std::size_t i = 0; i < points.size(); ++i)
        points[i] = Vec2{flat_xy[2 * i], flat_xy[2 * i + 1]};
    return rasterize_polygon(std::span<const Vec2>(points), width, height);
}

} // namespace bbbd
