#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbbd/errors.hpp"
#include "bbbd/order_matrix.hpp"

namespace bbbd {

// Annotated truth for one scene, aligned with the scene's instance order.
// occlusion_ratio is empty when the annotations carry no ratios; an instance
// with ratio > 0 is always labelled occluded.
struct GroundTruth {
    OrderMatrix order;
    std::vector<bool> occluded;
    std::vector<std::optional<double>> occlusion_ratio;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// Order-recovery tally. value() is absent for the 0/0 case (no related pairs
// to score) rather than collapsing it to zero.
struct OrderAccuracy {
    std::size_t matched = 0;
    std::size_t related = 0;

    [[nodiscard]] std::optional<double> value() const {
        if (related == 0) return std::nullopt;
        return static_cast<double>(matched) / static_cast<double>(related);
    }
};

// Fraction of ground-truth-related unordered pairs (gt cell != 0) whose
// predicted direction matches. Strict mode scores every unordered pair
// instead, so predicted relations on gt-unrelated pairs count against it.
[[nodiscard]] inline OrderAccuracy order_accuracy(const OrderMatrix& pred,
                                                  const OrderMatrix& gt,
                                                  bool strict = false) {
    if (pred.size() != gt.size())
        throw DimensionMismatch("order_accuracy: matrices are " + std::to_string(pred.size()) +
                                " and " + std::to_string(gt.size()) + " wide");
    OrderAccuracy acc;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        for (std::size_t j = i + 1; j < gt.size(); ++j) {
            if (!strict && gt.at(i, j) == 0) continue;
            ++acc.related;
            if (pred.at(i, j) == gt.at(i, j)) ++acc.matched;
        }
    }
    return acc;
}

// Detection confusion counts (positive = occluded) plus the order-recovery
// tallies, with the ratio metrics derived on demand. Undefined ratios (zero
// denominators) are reported as absent, never as silent zeros.
struct EvalReport {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::size_t related_pairs = 0;
    std::size_t matched_pairs = 0;
    std::size_t strict_related_pairs = 0;
    std::size_t strict_matched_pairs = 0;

    [[nodiscard]] std::size_t total_objects() const { return tp + fp + tn + fn; }

    [[nodiscard]] double accuracy() const {
        const std::size_t total = total_objects();
        return total ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
    }

    [[nodiscard]] std::optional<double> precision() const {
        if (tp + fp == 0) return std::nullopt;
        return static_cast<double>(tp) / static_cast<double>(tp + fp);
    }

    [[nodiscard]] std::optional<double> recall() const {
        if (tp + fn == 0) return std::nullopt;
        return static_cast<double>(tp) / static_cast<double>(tp + fn);
    }

    [[nodiscard]] std::optional<double> order_accuracy_value() const {
        return OrderAccuracy{matched_pairs, related_pairs}.value();
    }

    [[nodiscard]] std::optional<double> strict_order_accuracy_value() const {
        return OrderAccuracy{strict_matched_pairs, strict_related_pairs}.value();
    }
};

// Binary confusion counts of predicted occlusion labels against the ground
// truth; the order tallies are left zero for the caller to fill.
[[nodiscard]] inline EvalReport detection_report(const std::vector<bool>& pred,
                                                 const GroundTruth& gt) {
    if (pred.size() != gt.occluded.size())
        throw LengthMismatch("detection_report: " + std::to_string(pred.size()) +
                             " labels vs " + std::to_string(gt.occluded.size()) +
                             " ground-truth objects");
    EvalReport r;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] && gt.occluded[i]) ++r.tp;
        else if (pred[i] && !gt.occluded[i]) ++r.fp;
        else if (!pred[i] && !gt.occluded[i]) ++r.tn;
        else ++r.fn;
    }
    return r;
}

// Micro-average: counts are summed across images before any ratio is taken.
[[nodiscard]] inline EvalReport aggregate(std::span<const EvalReport> reports) {
    EvalReport total;
    for (const EvalReport& r : reports) {
        total.tp += r.tp;
        total.fp += r.fp;
        total.tn += r.tn;
        total.fn += r.fn;
        total.related_pairs += r.related_pairs;
        total.matched_pairs += r.matched_pairs;
        total.strict_related_pairs += r.strict_related_pairs;
        total.strict_matched_pairs += r.strict_matched_pairs;
    }
    return total;
}

} // namespace bbbd
