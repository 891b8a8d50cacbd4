#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "bbbd/detector.hpp"
#include "bbbd/evaluation.hpp"
#include "bbbd/prng.hpp"
#include "bbbd/synth.hpp"

using namespace bbbd;

namespace {

OrderMatrix random_matrix(SplitMix64& rng, std::size_t n) {
    OrderMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m.set_pair(i, j, static_cast<int>(rng.next_int(-1, 1)));
    return m;
}

OrderMatrix negate(const OrderMatrix& m) {
    OrderMatrix out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            out.set_pair(i, j, -m.at(i, j));
    return out;
}

} // namespace

TEST_CASE("order_accuracy: identity and full inversion") {
    SplitMix64 rng(4001);
    for (int t = 0; t < 50; ++t) {
        const OrderMatrix gt = random_matrix(rng, static_cast<std::size_t>(rng.next_int(1, 10)));
        const OrderAccuracy same = order_accuracy(gt, gt);
        std::size_t related = 0;
        for (std::size_t i = 0; i < gt.size(); ++i)
            for (std::size_t j = i + 1; j < gt.size(); ++j)
                if (gt.at(i, j) != 0) ++related;
        CHECK(same.related == related);
        CHECK(same.matched == related);
        if (related > 0) {
            CHECK(same.value() == 1.0);
            // Transpose-negation flips every related direction.
            const OrderAccuracy flipped = order_accuracy(negate(gt), gt);
            CHECK(flipped.value() == 0.0);
        } else {
            CHECK_FALSE(same.value().has_value());
        }
    }
}

TEST_CASE("order_accuracy: empty denominator is reported as absent") {
    const OrderAccuracy acc = order_accuracy(OrderMatrix(4), OrderMatrix(4));
    CHECK(acc.related == 0);
    CHECK_FALSE(acc.value().has_value());

    CHECK_THROWS_AS(static_cast<void>(order_accuracy(OrderMatrix(3), OrderMatrix(4))),
                    DimensionMismatch);
}

TEST_CASE("order_accuracy: strict mode scores unrelated pairs") {
    OrderMatrix gt(3);
    gt.set_pair(0, 1, 1);
    OrderMatrix pred(3);
    pred.set_pair(0, 1, 1);
    pred.set_pair(1, 2, 1); // spurious relation

    const OrderAccuracy lax = order_accuracy(pred, gt, false);
    CHECK(lax.related == 1);
    CHECK(lax.matched == 1);

    const OrderAccuracy strict = order_accuracy(pred, gt, true);
    CHECK(strict.related == 3);
    CHECK(strict.matched == 2);
}

TEST_CASE("order_accuracy: three stacked discs, hand-counted") {
    SceneSpec spec;
    spec.width = 24;
    spec.height = 24;
    for (auto [cx, cy] : {std::pair{9.0, 9.0}, {15.0, 10.0}, {11.0, 15.0}}) {
        Shape s;
        s.kind = ShapeKind::disc;
        s.cx = cx;
        s.cy = cy;
        s.rx = s.ry = 5.0;
        spec.shapes.push_back(s);
    }
    const auto instances = render_modal(spec).scene.instances;
    const OracleResult oracle = oracle_order(spec);
    const OrderMatrix pred = build_order_matrix(instances);

    std::size_t related = 0, matched = 0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            if (oracle.order.at(i, j) != 0) {
                ++related;
                if (pred.at(i, j) == oracle.order.at(i, j)) ++matched;
            }
    const OrderAccuracy acc = order_accuracy(pred, oracle.order);
    CHECK(acc.related == related);
    CHECK(acc.matched == matched);
}

TEST_CASE("order_accuracy is invariant under simultaneous permutation") {
    SplitMix64 rng(4002);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.next_int(2, 9));
        const OrderMatrix pred = random_matrix(rng, n);
        const OrderMatrix gt = random_matrix(rng, n);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = n; k > 1; --k)
            std::swap(perm[k - 1],
                      perm[static_cast<std::size_t>(rng.next_int(0, static_cast<std::int64_t>(k) - 1))]);

        OrderMatrix pred_p(n), gt_p(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                pred_p.set_pair(i, j, pred.at(perm[i], perm[j]));
                gt_p.set_pair(i, j, gt.at(perm[i], perm[j]));
            }

        const OrderAccuracy a = order_accuracy(pred, gt);
        const OrderAccuracy b = order_accuracy(pred_p, gt_p);
        CHECK(a.related == b.related);
        CHECK(a.matched == b.matched);
    }
}

TEST_CASE("detection_report: perfect prediction") {
    GroundTruth gt;
    gt.order = OrderMatrix(4);
    gt.occluded = {true, false, true, false};
    const EvalReport r = detection_report(gt.occluded, gt);
    CHECK(r.accuracy() == 1.0);
    CHECK(r.fp == 0);
    CHECK(r.fn == 0);
    CHECK(r.tp == 2);
    CHECK(r.tn == 2);
}

TEST_CASE("detection_report: all-negative prediction on a 5208/4300 split") {
    GroundTruth gt;
    gt.order = OrderMatrix(9508);
    gt.occluded.assign(9508, false);
    for (std::size_t i = 0; i < 5208; ++i) gt.occluded[i] = true;

    const std::vector<bool> pred(9508, false);
    const EvalReport r = detection_report(pred, gt);
    CHECK(r.tn == 4300);
    CHECK(r.fn == 5208);
    CHECK(r.tp == 0);
    CHECK(r.fp == 0);
    CHECK(r.accuracy() == doctest::Approx(4300.0 / 9508.0));
    CHECK_FALSE(r.precision().has_value()); // no positive predictions
    CHECK(r.recall() == 0.0);
}

TEST_CASE("detection_report: random labels equal a naive tally") {
    SplitMix64 rng(4003);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.next_int(0, 40));
        GroundTruth gt;
        gt.order = OrderMatrix(n);
        gt.occluded.resize(n);
        std::vector<bool> pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gt.occluded[i] = rng.next_double() < 0.5;
            pred[i] = rng.next_double() < 0.5;
        }

        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred[i] && gt.occluded[i]) ++tp;
            if (pred[i] && !gt.occluded[i]) ++fp;
            if (!pred[i] && !gt.occluded[i]) ++tn;
            if (!pred[i] && gt.occluded[i]) ++fn;
        }
        const EvalReport r = detection_report(pred, gt);
        CHECK(r.tp == tp);
        CHECK(r.fp == fp);
        CHECK(r.tn == tn);
        CHECK(r.fn == fn);
        CHECK(r.total_objects() == n);
    }
}

TEST_CASE("detection_report: length mismatch throws") {
    GroundTruth gt;
    gt.order = OrderMatrix(2);
    gt.occluded = {true, false};
    const std::vector<bool> pred{true};
    CHECK_THROWS_AS(static_cast<void>(detection_report(pred, gt)), LengthMismatch);
}

TEST_CASE("aggregate: identity and additivity") {
    EvalReport a;
    a.tp = 1;
    a.tn = 1;
    a.related_pairs = 3;
    a.matched_pairs = 2;
    const std::vector<EvalReport> one{a};
    const EvalReport same = aggregate(one);
    CHECK(same.tp == a.tp);
    CHECK(same.matched_pairs == a.matched_pairs);

    EvalReport b;
    b.fp = 1;
    b.fn = 1;
    const std::vector<EvalReport> two{a, b};
    const EvalReport sum = aggregate(two);
    CHECK(sum.tp == 1);
    CHECK(sum.fp == 1);
    CHECK(sum.tn == 1);
    CHECK(sum.fn == 1);
    CHECK(sum.total_objects() == 4);
}

TEST_CASE("aggregate: micro-average equals a flat tally over 100 scenes") {
    const auto specs = generate_random(4004, 100, {});
    std::vector<EvalReport> reports;
    std::size_t flat_tp = 0, flat_fp = 0, flat_tn = 0, flat_fn = 0;
    for (const auto& spec : specs) {
        const Scene scene = synth_scene(spec);
        const OrderMatrix pred = build_order_matrix(scene.instances);
        const auto labels = detect_occluded(pred);
        reports.push_back(detection_report(labels, *scene.gt));
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] && scene.gt->occluded[i]) ++flat_tp;
            if (labels[i] && !scene.gt->occluded[i]) ++flat_fp;
            if (!labels[i] && !scene.gt->occluded[i]) ++flat_tn;
            if (!labels[i] && scene.gt->occluded[i]) ++flat_fn;
        }
    }
    const EvalReport total = aggregate(reports);
    CHECK(total.tp == flat_tp);
    CHECK(total.fp == flat_fp);
    CHECK(total.tn == flat_tn);
    CHECK(total.fn == flat_fn);

    // The detection identity: predicted-positive plus missed-positive counts
    // recover the ground-truth positive count exactly.
    std::size_t gt_positives = 0;
    for (const auto& spec : specs) {
        const Scene scene = synth_scene(spec);
        for (bool v : scene.gt->occluded)
            if (v) ++gt_positives;
    }
    CHECK(total.tp + total.fn == gt_positives);
}
