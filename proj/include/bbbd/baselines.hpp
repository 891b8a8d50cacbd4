#pragma once

#include <span>
#include <vector>

#include "bbbd/detector.hpp"

namespace bbbd {

enum class AreaMode {
    mask_population, // total visible-mask pixel count
    bbox_area,       // bounding-box area
};

enum class YMode {
    bbox_bottom,   // bounding-box bottom edge (y_max, rows grow downward)
    mask_centroid, // mean row of the visible mask
};

// The baselines are box/size heuristics, so the mask-collision gate is off
// by default; it can be switched on to measure its effect.
struct BaselineConfig {
    AreaMode area_mode = AreaMode::mask_population;
    YMode y_mode = YMode::bbox_bottom;
    bool collision_gate = false;
    CollisionRule collision_rule = CollisionRule::adjacent8;
};

namespace detail {

// Candidate gate shared by both baselines: non-empty box intersection and
// both masks present inside it. Mirrors the detector's first two gates.
[[nodiscard]] inline bool baseline_candidate(const Instance& a, const Instance& b,
                                             const BaselineConfig& cfg) {
    const BBox ia = intersection(a.bbox, b.bbox);
    if (ia.is_empty()) return false;
    const Bitmask in_a = crop(a.mask, ia);
    const Bitmask in_b = crop(b.mask, ia);
    if (in_a.population() == 0 || in_b.population() == 0) return false;
    if (cfg.collision_gate && !masks_collide(in_a, in_b, cfg.collision_rule)) return false;
    return true;
}

[[nodiscard]] inline double y_value(const Instance& inst, YMode mode) {
    if (mode == YMode::bbox_bottom) return static_cast<double>(inst.bbox.y_max);
    std::size_t count = 0;
    double sum = 0.0;
    for (int y = 0; y < inst.mask.height(); ++y)
        for (int x = 0; x < inst.mask.width(); ++x)
            if (inst.mask.at(x, y)) {
                sum += y;
                ++count;
            }
    return count ? sum / static_cast<double>(count) : 0.0;
}

[[nodiscard]] inline long long area_value(const Instance& inst, AreaMode mode) {
    if (mode == AreaMode::mask_population)
        return static_cast<long long>(inst.mask.population());
    return inst.bbox.area();
}

} // namespace detail

// For each candidate pair, the instance with the larger Y value occludes the
// other; equal Y values leave the pair unordered.
[[nodiscard]] inline OrderMatrix yaxis_matrix(std::span<const Instance> scene,
                                              const BaselineConfig& cfg = {},
                                              unsigned jobs = 1) {
    detail::validate_instances(scene);
    return detail::assemble_matrix(scene.size(), jobs, [&](std::size_t i, std::size_t j) {
        const Instance& a = scene[i];
        const Instance& b = scene[j];
        if (!detail::baseline_candidate(a, b, cfg)) return PairRelation::NoRelation;
        const double ya = detail::y_value(a, cfg.y_mode);
        const double yb = detail::y_value(b, cfg.y_mode);
        if (ya > yb) return PairRelation::FirstOccludesSecond;
        if (yb > ya) return PairRelation::SecondOccludesFirst;
        return PairRelation::NoRelation;
    });
}

// For each candidate pair, the bigger instance occludes the smaller; equal
// sizes leave the pair unordered.
[[nodiscard]] inline OrderMatrix area_matrix(std::span<const Instance> scene,
                                             const BaselineConfig& cfg = {},
                                             unsigned jobs = 1) {
    detail::validate_instances(scene);
    return detail::assemble_matrix(scene.size(), jobs, [&](std::size_t i, std::size_t j) {
        const Instance& a = scene[i];
        const Instance& b = scene[j];
        if (!detail::baseline_candidate(a, b, cfg)) return PairRelation::NoRelation;
        const long long sa = detail::area_value(a, cfg.area_mode);
        const long long sb = detail::area_value(b, cfg.area_mode);
        if (sa > sb) return PairRelation::FirstOccludesSecond;
        if (sb > sa) return PairRelation::SecondOccludesFirst;
        return PairRelation::NoRelation;
    });
}

} // namespace bbbd
