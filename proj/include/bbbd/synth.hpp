#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bbbd/order_matrix.hpp"
#include "bbbd/polygon.hpp"
#include "bbbd/prng.hpp"
#include "bbbd/scene.hpp"

namespace bbbd {

// Axis-aligned filled rectangles are deliberately absent: a rectangle fills
// its own bounding box, so a rectangle occluder leaves zero occludee pixels
// inside the intersected area and every pair degenerates to the zero-count
// gate. That blind spot is covered by a dedicated fixture in the tests
// rather than by generated scenes.
enum class ShapeKind {
    disc,
    ellipse,
    diamond,
    convex_polygon,
};

[[nodiscard]] inline const char* shape_kind_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::disc: return "disc";
        case ShapeKind::ellipse: return "ellipse";
        case ShapeKind::diamond: return "diamond";
        case ShapeKind::convex_polygon: return "convex_polygon";
    }
    return "unknown";
}

struct Shape {
    ShapeKind kind = ShapeKind::disc;
    double cx = 0.0;
    double cy = 0.0;
    double rx = 0.0; // disc radius; ellipse/diamond x half-extent
    double ry = 0.0; // ellipse/diamond y half-extent
    std::vector<Vec2> vertices; // convex_polygon only
};

// A stack of shapes ordered by depth: index 0 is nearest the camera and
// strictly nearer shapes occlude farther ones wherever they overlap.
struct SceneSpec {
    int width = 0;
    int height = 0;
    std::vector<Shape> shapes;
    std::uint64_t seed = 0;
};

// Full-extent (amodal) raster of one shape, clipped to the image. Sampling
// is at pixel centers, matching the polygon rasterizer.
[[nodiscard]] inline Bitmask rasterize_shape(const Shape& s, int width, int height) {
    if (s.kind == ShapeKind::convex_polygon)
        return rasterize_polygon(std::span<const Vec2>(s.vertices), width, height);

    Bitmask out(width, height);
    const double reach = std::max(s.rx, s.ry) + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(s.cx - reach)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(s.cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(s.cy - reach)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(s.cy + reach)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = (x + 0.5) - s.cx;
            const double dy = (y + 0.5) - s.cy;
            bool inside = false;
            switch (s.kind) {
                case ShapeKind::disc:
                    inside = dx * dx + dy * dy <= s.rx * s.rx;
                    break;
                case ShapeKind::ellipse:
                    inside = (dx * dx) / (s.rx * s.rx) + (dy * dy) / (s.ry * s.ry) <= 1.0;
                    break;
                case ShapeKind::diamond:
                    inside = std::abs(dx) / s.rx + std::abs(dy) / s.ry <= 1.0;
                    break;
                case ShapeKind::convex_polygon:
                    break;
            }
            if (inside) out.set(x, y);
        }
    }
    return out;
}

struct RenderedScene {
    Scene scene;                    // instances in depth order, ids = depth ranks
    std::vector<Bitmask> amodal;    // full-extent masks, same order
    std::vector<bool> fully_hidden; // true where the visible mask came out empty
};

// Painter-style rendering: each shape's full-extent raster is computed
// independently, and the visible mask of shape k is its raster minus the
// union of all nearer rasters. Fully hidden shapes are retained and flagged.
// Boxes are the tight boxes of the visible masks (empty when fully hidden).
[[nodiscard]] inline RenderedScene render_modal(const SceneSpec& spec) {
    RenderedScene out;
    out.scene.width = spec.width;
    out.scene.height = spec.height;

    Bitmask covered(spec.width, spec.height);
    for (std::size_t k = 0; k < spec.shapes.size(); ++k) {
        Bitmask amodal = rasterize_shape(spec.shapes[k], spec.width, spec.height);
        Bitmask modal = difference(amodal, covered);
        covered |= amodal;

        Instance inst;
        inst.id = static_cast<std::int64_t>(k);
        inst.bbox = tight_bbox(modal);
        inst.category = shape_kind_name(spec.shapes[k].kind);
        inst.mask = std::move(modal);
        out.fully_hidden.push_back(inst.mask.population() == 0);
        out.scene.instances.push_back(std::move(inst));
        out.amodal.push_back(std::move(amodal));
    }
    return out;
}

struct OracleResult {
    OrderMatrix order;
    std::vector<bool> occluded;
};

// Ground truth straight from the stacking order: shape i occludes shape j
// iff i is nearer and their full-extent rasters share a pixel. An instance
// is occluded iff some nearer shape overlaps it, which is exactly when its
// visible mask differs from its full-extent raster. Independent of the
// detector under test.
[[nodiscard]] inline OracleResult oracle_order(const SceneSpec& spec) {
    std::vector<Bitmask> amodal;
    amodal.reserve(spec.shapes.size());
    for (const Shape& s : spec.shapes)
        amodal.push_back(rasterize_shape(s, spec.width, spec.height));

    OracleResult out;
    out.order = OrderMatrix(amodal.size());
    for (std::size_t i = 0; i < amodal.size(); ++i)
        for (std::size_t j = i + 1; j < amodal.size(); ++j)
            if (masks_intersect(amodal[i], amodal[j]))
                out.order.set_pair(i, j, 1);

    out.occluded.assign(amodal.size(), false);
    for (std::size_t i = 0; i < amodal.size(); ++i)
        for (std::size_t j = 0; j < amodal.size(); ++j)
            if (out.order.at(i, j) == -1) {
                out.occluded[i] = true;
                break;
            }
    return out;
}

// Renders the spec and attaches the oracle's ground truth, including exact
// occlusion ratios (hidden fraction of each shape's full raster).
[[nodiscard]] inline Scene synth_scene(const SceneSpec& spec, std::int64_t image_id = 0) {
    RenderedScene rendered = render_modal(spec);
    OracleResult oracle = oracle_order(spec);

    GroundTruth gt;
    gt.order = std::move(oracle.order);
    gt.occluded = std::move(oracle.occluded);
    gt.occlusion_ratio.reserve(rendered.scene.instances.size());
    for (std::size_t i = 0; i < rendered.scene.instances.size(); ++i) {
        const double amodal_pop = static_cast<double>(rendered.amodal[i].population());
        const double modal_pop = static_cast<double>(rendered.scene.instances[i].mask.population());
        gt.occlusion_ratio.push_back(1.0 - modal_pop / amodal_pop);
    }

    rendered.scene.image_id = image_id;
    rendered.scene.gt = std::move(gt);
    return std::move(rendered.scene);
}

// Pairwise overlap-ratio band for generated scenes: for every pair of shapes,
// |A intersect B| / min(|A|, |B|) over the full-extent rasters must land in
// [overlap_min, overlap_max]. A positive minimum therefore forces every pair
// to overlap; [0, 0] forces all pairs disjoint.
struct GenConstraints {
    int width = 64;
    int height = 64;
    int min_shapes = 2;
    int max_shapes = 10;
    double overlap_min = 0.0;
    double overlap_max = 1.0;
    double size_min = 4.0;
    double size_max = 16.0;
    std::vector<ShapeKind> kinds = {ShapeKind::disc, ShapeKind::ellipse,
                                    ShapeKind::diamond, ShapeKind::convex_polygon};
    int placement_tries = 256; // per shape
    int scene_restarts = 64;   // per scene
};

namespace detail {

[[nodiscard]] inline Shape sample_shape(SplitMix64& rng, const GenConstraints& c) {
    Shape s;
    s.kind = c.kinds[static_cast<std::size_t>(rng.next_int(0, static_cast<std::int64_t>(c.kinds.size()) - 1))];
    s.rx = rng.next_double(c.size_min, c.size_max);
    s.ry = (s.kind == ShapeKind::disc) ? s.rx : rng.next_double(c.size_min, c.size_max);
    const double margin = std::max(s.rx, s.ry);
    const double x_hi = std::max(margin, c.width - 1 - margin);
    const double y_hi = std::max(margin, c.height - 1 - margin);
    s.cx = rng.next_double(std::min(margin, x_hi), x_hi);
    s.cy = rng.next_double(std::min(margin, y_hi), y_hi);
    if (s.kind == ShapeKind::convex_polygon) {
        // Vertices on an ellipse at jittered angles: convex by construction.
        const int n = static_cast<int>(rng.next_int(5, 8));
        s.vertices.resize(n);
        for (int k = 0; k < n; ++k) {
            const double theta = 2.0 * 3.14159265358979323846 *
                                 (k + 0.7 * rng.next_double()) / n;
            s.vertices[k] = Vec2{s.cx + s.rx * std::cos(theta),
                                 s.cy + s.ry * std::sin(theta)};
        }
    }
    return s;
}

// Re-centers a sampled shape near an anchor so that positive overlap minima
// are reachable without exhausting the retry budget.
inline void move_near(Shape& s, const Shape& anchor, SplitMix64& rng) {
    const double spread = std::max(anchor.rx, anchor.ry) + std::max(s.rx, s.ry);
    const double dx = rng.next_double(-spread, spread);
    const double dy = rng.next_double(-spread, spread);
    const double new_cx = anchor.cx + dx;
    const double new_cy = anchor.cy + dy;
    const double shift_x = new_cx - s.cx;
    const double shift_y = new_cy - s.cy;
    s.cx = new_cx;
    s.cy = new_cy;
    for (Vec2& v : s.vertices) {
        v.x += shift_x;
        v.y += shift_y;
    }
}

[[nodiscard]] inline bool overlap_in_band(const Bitmask& a, const Bitmask& b,
                                          double lo, double hi) {
    const std::size_t inter = intersection_population(a, b);
    const std::size_t min_pop = std::min(a.population(), b.population());
    const double ratio = static_cast<double>(inter) / static_cast<double>(min_pop);
    return ratio >= lo && ratio <= hi;
}

[[nodiscard]] inline SceneSpec generate_one(std::uint64_t scene_seed, const GenConstraints& c) {
    SplitMix64 rng(scene_seed);
    for (int restart = 0; restart < c.scene_restarts; ++restart) {
        SceneSpec spec;
        spec.width = c.width;
        spec.height = c.height;
        spec.seed = scene_seed;
        const int n = static_cast<int>(rng.next_int(c.min_shapes, c.max_shapes));

        std::vector<Bitmask> rasters;
        bool scene_ok = true;
        for (int k = 0; k < n && scene_ok; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < c.placement_tries; ++attempt) {
                Shape s = sample_shape(rng, c);
                if (c.overlap_min > 0.0 && !spec.shapes.empty()) {
                    const auto& anchor = spec.shapes[static_cast<std::size_t>(
                        rng.next_int(0, static_cast<std::int64_t>(spec.shapes.size()) - 1))];
                    move_near(s, anchor, rng);
                }
                Bitmask raster = rasterize_shape(s, c.width, c.height);
                if (raster.population() == 0) continue;
                bool ok = true;
                for (const Bitmask& prev : rasters)
                    if (!overlap_in_band(raster, prev, c.overlap_min, c.overlap_max)) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                spec.shapes.push_back(std::move(s));
                rasters.push_back(std::move(raster));
                placed = true;
                break;
            }
            if (!placed) scene_ok = false;
        }
        if (scene_ok) return spec;
    }
    throw InfeasibleConstraints("generate_random: retry budget exhausted for seed " +
                                std::to_string(scene_seed));
}

} // namespace detail

// Deterministic for a fixed seed: each scene draws from its own SplitMix64
// stream, so scenes can be generated independently and in parallel without
// changing the result.
[[nodiscard]] inline std::vector<SceneSpec> generate_random(std::uint64_t seed,
                                                            std::size_t count,
                                                            const GenConstraints& c = {}) {
    if (c.min_shapes < 0 || c.max_shapes < c.min_shapes ||
        c.overlap_min < 0.0 || c.overlap_max < c.overlap_min ||
        c.size_min <= 0.0 || c.size_max < c.size_min || c.kinds.empty())
        throw InfeasibleConstraints("generate_random: invalid constraint ranges");

    SplitMix64 root(seed);
    std::vector<std::uint64_t> scene_seeds(count);
    for (auto& s : scene_seeds) s = root.next();

    std::vector<SceneSpec> specs;
    specs.reserve(count);
    for (std::uint64_t s : scene_seeds)
        specs.push_back(detail::generate_one(s, c));
    return specs;
}

} // namespace bbbd
