#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bbbd/bitmask.hpp"
#include "bbbd/box.hpp"
#include "bbbd/errors.hpp"
#include "bbbd/instance.hpp"
#include "bbbd/order_matrix.hpp"
#include "bbbd/parallel.hpp"

namespace bbbd {

enum class PairRelation {
    NoRelation,
    FirstOccludesSecond,
    SecondOccludesFirst,
};

// How two masks must touch inside the intersected area before the pair is
// considered related. Visible masks of distinct instances are disjoint by
// construction, so requiring a strict overlap would almost never fire;
// contact within one pixel (8-connectivity) captures the shared occlusion
// boundary and is the default. overlap_only and none exist to measure the
// gate's effect.
enum class CollisionRule {
    adjacent8,
    overlap_only,
    none,
};

// What to do when both in-IA pixel counts are equal and box containment
// named no occluder.
enum class CountTieBreak {
    leave_unordered,
    larger_total_mask_wins,
};

struct BbbdConfig {
    CollisionRule collision_rule = CollisionRule::adjacent8;
    CountTieBreak count_tie_break = CountTieBreak::leave_unordered;
};

[[nodiscard]] inline bool masks_collide(const Bitmask& a, const Bitmask& b,
                                        CollisionRule rule) {
    switch (rule) {
        case CollisionRule::none:
            return true;
        case CollisionRule::overlap_only:
            return masks_intersect(a, b);
        case CollisionRule::adjacent8:
            return masks_intersect(dilate8(a), b);
    }
    return false;
}

// Pairwise occlusion verdict. The decision sequence:
//
//   1. IA = intersection of the two bounding boxes; empty IA means no
//      relation.
//   2. Count each instance's visible pixels inside the IA; a zero count on
//      either side means the IA holds no part of that object, no relation.
//   3. The masks must collide inside the IA per cfg.collision_rule. Both
//      masks are cropped to the IA first, so pixels adjacent only across the
//      IA border do not count.
//   4. Box containment gives a tentative verdict: the instance with the
//      smaller, fully contained box is the occluder. Identical boxes name no
//      smaller instance and give no verdict.
//   5. The in-IA count comparison gives the final verdict: the instance with
//      more visible pixels inside the IA occludes the other. This overrides
//      a containment verdict; on a count tie the containment verdict (if
//      any) stands, otherwise cfg.count_tie_break applies.
[[nodiscard]] inline PairRelation classify_pair(const Instance& a, const Instance& b,
                                                const BbbdConfig& cfg = {}) {
    if (!a.mask.same_extent(b.mask))
        throw ExtentMismatch("classify_pair: instances " + std::to_string(a.id) +
                             " and " + std::to_string(b.id) + " have different mask extents");

    const BBox ia = intersection(a.bbox, b.bbox);
    if (ia.is_empty()) return PairRelation::NoRelation;

    const Bitmask in_a = crop(a.mask, ia);
    const Bitmask in_b = crop(b.mask, ia);
    const std::size_t count_a = in_a.population();
    const std::size_t count_b = in_b.population();
    if (count_a == 0 || count_b == 0) return PairRelation::NoRelation;

    if (!masks_collide(in_a, in_b, cfg.collision_rule)) return PairRelation::NoRelation;

    PairRelation verdict = PairRelation::NoRelation;
    if (!(a.bbox == b.bbox)) {
        if (contains(b.bbox, a.bbox))
            verdict = PairRelation::FirstOccludesSecond;
        else if (contains(a.bbox, b.bbox))
            verdict = PairRelation::SecondOccludesFirst;
    }

    if (count_a > count_b) return PairRelation::FirstOccludesSecond;
    if (count_b > count_a) return PairRelation::SecondOccludesFirst;
    if (verdict != PairRelation::NoRelation) return verdict;
    if (cfg.count_tie_break == CountTieBreak::larger_total_mask_wins) {
        const std::size_t total_a = a.mask.population();
        const std::size_t total_b = b.mask.population();
        if (total_a > total_b) return PairRelation::FirstOccludesSecond;
        if (total_b > total_a) return PairRelation::SecondOccludesFirst;
    }
    return PairRelation::NoRelation;
}

namespace detail {

inline void validate_instances(std::span<const Instance> scene) {
    if (scene.empty()) return;
    std::unordered_set<std::int64_t> seen;
    for (const Instance& inst : scene) {
        if (!seen.insert(inst.id).second)
            throw DuplicateId("instance id " + std::to_string(inst.id) +
                              " appears more than once");
        if (!inst.mask.same_extent(scene.front().mask))
            throw ExtentMismatch("instance " + std::to_string(inst.id) +
                                 ": mask extent differs from the scene's");
    }
}

[[nodiscard]] inline std::vector<std::pair<std::uint32_t, std::uint32_t>>
unordered_pairs(std::size_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);
    return pairs;
}

// Shared pair-parallel matrix assembly. classify returns the verdict for
// pair (i, j); every pair writes one slot, so the result is identical at any
// parallelism degree.
template <typename Classify>
[[nodiscard]] OrderMatrix assemble_matrix(std::size_t n, unsigned jobs, Classify&& classify) {
    OrderMatrix m(n);
    if (n < 2) return m;
    const auto pairs = unordered_pairs(n);
    std::vector<std::int8_t> verdicts(pairs.size(), 0);
    parallel_for(pairs.size(), jobs, [&](std::size_t k) {
        switch (classify(pairs[k].first, pairs[k].second)) {
            case PairRelation::FirstOccludesSecond: verdicts[k] = 1; break;
            case PairRelation::SecondOccludesFirst: verdicts[k] = -1; break;
            case PairRelation::NoRelation: verdicts[k] = 0; break;
        }
    });
    for (std::size_t k = 0; k < pairs.size(); ++k)
        m.set_pair(pairs[k].first, pairs[k].second, verdicts[k]);
    return m;
}

} // namespace detail

// Runs classify_pair over every unordered pair and assembles the order
// matrix. Distinct pairs may be evaluated concurrently; the result is
// bitwise identical to sequential evaluation.
[[nodiscard]] inline OrderMatrix build_order_matrix(std::span<const Instance> scene,
                                                    const BbbdConfig& cfg = {},
                                                    unsigned jobs = 1) {
    detail::validate_instances(scene);
    return detail::assemble_matrix(scene.size(), jobs, [&](std::size_t i, std::size_t j) {
        return classify_pair(scene[i], scene[j], cfg);
    });
}

// Per-instance occlusion labels: instance i is occluded iff row i contains
// at least one -1. Values 0 or 1 alone mean isolated or occluder.
[[nodiscard]] inline std::vector<bool> detect_occluded(const OrderMatrix& m) {
    std::vector<bool> labels(m.size(), false);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (m.at(i, j) == -1) {
                labels[i] = true;
                break;
            }
    return labels;
}

} // namespace bbbd
