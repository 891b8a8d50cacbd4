#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "bbbd/detector.hpp"
#include "bbbd/synth.hpp"

#include "case_fixtures.hpp"
#include "test_support.hpp"

using namespace bbbd;
using namespace casefixtures;

namespace {

std::vector<Instance> rendered_instances(const SceneSpec& spec) {
    return render_modal(spec).scene.instances;
}

Shape disc(double cx, double cy, double r) {
    Shape s;
    s.kind = ShapeKind::disc;
    s.cx = cx;
    s.cy = cy;
    s.rx = s.ry = r;
    return s;
}

} // namespace

TEST_CASE("classify_pair: empty intersection means no relation") {
    auto [a1, b1] = case_a();
    CHECK(classify_pair(a1, b1) == PairRelation::NoRelation);
    auto [a2, b2] = case_f();
    CHECK(classify_pair(a2, b2) == PairRelation::NoRelation);
}

TEST_CASE("classify_pair: zero in-IA count means no relation") {
    auto [a, b] = case_b();
    // Sanity: the boxes do intersect and the first mask is present there.
    const BBox ia = intersection(a.bbox, b.bbox);
    REQUIRE_FALSE(ia.is_empty());
    CHECK(count_in(a.mask, ia) > 0);
    CHECK(count_in(b.mask, ia) == 0);
    CHECK(classify_pair(a, b) == PairRelation::NoRelation);
}

TEST_CASE("classify_pair: collision gate") {
    auto [a, b] = case_c();
    const BBox ia = intersection(a.bbox, b.bbox);
    REQUIRE(count_in(a.mask, ia) == 3);
    REQUIRE(count_in(b.mask, ia) == 2);

    CHECK(classify_pair(a, b) == PairRelation::NoRelation);

    BbbdConfig no_gate;
    no_gate.collision_rule = CollisionRule::none;
    CHECK(classify_pair(a, b, no_gate) == PairRelation::FirstOccludesSecond);

    // Strict-overlap collisions never fire on disjoint visible masks.
    BbbdConfig overlap_only;
    overlap_only.collision_rule = CollisionRule::overlap_only;
    CHECK(classify_pair(a, b, overlap_only) == PairRelation::NoRelation);
}

TEST_CASE("classify_pair: containment verdict stands on count ties") {
    auto [inner, outer] = case_d();
    REQUIRE(contains(outer.bbox, inner.bbox));
    const BBox ia = intersection(inner.bbox, outer.bbox);
    REQUIRE(count_in(inner.mask, ia) == 11);
    REQUIRE(count_in(outer.mask, ia) == 11);

    CHECK(classify_pair(inner, outer) == PairRelation::FirstOccludesSecond);
    CHECK(classify_pair(outer, inner) == PairRelation::SecondOccludesFirst);
}

TEST_CASE("classify_pair: larger in-IA count wins") {
    auto [near_inst, far_inst] = case_e();
    const BBox ia = intersection(near_inst.bbox, far_inst.bbox);
    REQUIRE(count_in(near_inst.mask, ia) == 8);
    REQUIRE(count_in(far_inst.mask, ia) == 7);

    CHECK(classify_pair(near_inst, far_inst) == PairRelation::FirstOccludesSecond);
    CHECK(classify_pair(far_inst, near_inst) == PairRelation::SecondOccludesFirst);
}

TEST_CASE("classify_pair: count comparison overrides containment") {
    // Drop one of the outer instance's in-IA pixels: 11 vs 10, and the count
    // verdict now agrees with containment.
    auto [inner, outer] = case_d();
    outer.mask.set(4, 3, false);
    CHECK(classify_pair(inner, outer) == PairRelation::FirstOccludesSecond);

    // Flip it: the outer instance gets the larger in-IA count, and the count
    // verdict overrides the contradicting containment verdict.
    auto [inner2, outer2] = case_d();
    inner2.mask.set(4, 4, false);
    CHECK(classify_pair(inner2, outer2) == PairRelation::SecondOccludesFirst);
}

TEST_CASE("classify_pair: painter-rendered diamonds on an 8x8 grid") {
    SceneSpec spec;
    spec.width = 8;
    spec.height = 8;
    Shape d1;
    d1.kind = ShapeKind::diamond;
    d1.cx = 3.0;
    d1.cy = 3.0;
    d1.rx = d1.ry = 2.5;
    Shape d2 = d1;
    d2.cx = 5.0;
    d2.cy = 4.0;
    spec.shapes = {d1, d2};

    const auto instances = rendered_instances(spec);
    const OracleResult oracle = oracle_order(spec);
    REQUIRE(oracle.order.at(0, 1) == 1);

    const BBox ia = intersection(instances[0].bbox, instances[1].bbox);
    CHECK(count_in(instances[0].mask, ia) > count_in(instances[1].mask, ia));
    CHECK(classify_pair(instances[0], instances[1]) == PairRelation::FirstOccludesSecond);
}

TEST_CASE("classify_pair: rectangle occluder blind spot") {
    auto [front, behind] = rectangle_degenerate();
    const BBox ia = intersection(front.bbox, behind.bbox);
    REQUIRE_FALSE(ia.is_empty());
    CHECK(count_in(behind.mask, ia) == 0);
    CHECK(classify_pair(front, behind) == PairRelation::NoRelation);
}

TEST_CASE("classify_pair: empty-mask instances never relate") {
    auto [a, b] = case_e();
    Instance empty;
    empty.id = 9;
    empty.mask = Bitmask(extent, extent);
    empty.bbox = BBox::empty();
    CHECK(classify_pair(a, empty) == PairRelation::NoRelation);
    CHECK(classify_pair(empty, b) == PairRelation::NoRelation);
}

TEST_CASE("classify_pair: extent mismatch throws") {
    auto [a, b] = case_a();
    Instance other;
    other.id = 5;
    other.mask = Bitmask(10, 10);
    other.mask.set(1, 1);
    other.bbox = BBox{1, 1, 1, 1};
    CHECK_THROWS_AS(static_cast<void>(classify_pair(a, other)), ExtentMismatch);
    (void)b;
}

TEST_CASE("classify_pair: count tie-break configuration") {
    // Boxes overlap in [2,3]x[3,3]; each side puts exactly one pixel there
    // and the supports touch, so the counts tie with no containment.
    Instance a = make_instance(0, {{3, 3}, {0, 0}});
    Instance b = make_instance(1, {{2, 3}, {7, 7}, {6, 7}});
    REQUIRE(classify_pair(a, b) == PairRelation::NoRelation);

    BbbdConfig tie;
    tie.count_tie_break = CountTieBreak::larger_total_mask_wins;
    CHECK(classify_pair(a, b, tie) == PairRelation::SecondOccludesFirst);
    CHECK(classify_pair(b, a, tie) == PairRelation::FirstOccludesSecond);
}

TEST_CASE("classify_pair mirrors for random pairs") {
    const auto specs = generate_random(2001, 60, {});
    for (const auto& spec : specs) {
        const auto instances = rendered_instances(spec);
        for (std::size_t i = 0; i < instances.size(); ++i) {
            for (std::size_t j = i + 1; j < instances.size(); ++j) {
                const PairRelation ab = classify_pair(instances[i], instances[j]);
                const PairRelation ba = classify_pair(instances[j], instances[i]);
                if (ab == PairRelation::NoRelation)
                    CHECK(ba == PairRelation::NoRelation);
                else if (ab == PairRelation::FirstOccludesSecond)
                    CHECK(ba == PairRelation::SecondOccludesFirst);
                else
                    CHECK(ba == PairRelation::FirstOccludesSecond);
            }
        }
    }
}

TEST_CASE("build_order_matrix: degenerate scenes") {
    CHECK(build_order_matrix({}).size() == 0);

    auto [a, b] = case_a();
    const std::vector<Instance> single{a};
    const OrderMatrix m = build_order_matrix(single);
    CHECK(m.size() == 1);
    CHECK(m.at(0, 0) == 0);
    (void)b;
}

TEST_CASE("build_order_matrix: error paths") {
    auto [a, b] = case_a();
    b.id = a.id;
    const std::vector<Instance> dup{a, b};
    CHECK_THROWS_AS(static_cast<void>(build_order_matrix(dup)), DuplicateId);

    auto [c, d] = case_a();
    d.mask = Bitmask(10, 10);
    d.mask.set(1, 1);
    d.bbox = BBox{1, 1, 1, 1};
    const std::vector<Instance> mixed{c, d};
    CHECK_THROWS_AS(static_cast<void>(build_order_matrix(mixed)), ExtentMismatch);
}

TEST_CASE("build_order_matrix: three stacked discs match the painter oracle") {
    SceneSpec spec;
    spec.width = 24;
    spec.height = 24;
    spec.shapes = {disc(9, 9, 5), disc(15, 10, 5), disc(11, 15, 5)};

    const auto instances = rendered_instances(spec);
    const OracleResult oracle = oracle_order(spec);
    // Every pair overlaps, so the oracle relates all three.
    REQUIRE(oracle.order.at(0, 1) == 1);
    REQUIRE(oracle.order.at(0, 2) == 1);
    REQUIRE(oracle.order.at(1, 2) == 1);

    const OrderMatrix pred = build_order_matrix(instances);
    CHECK(pred == oracle.order);

    const auto labels = detect_occluded(pred);
    const std::vector<bool> expected{false, true, true};
    CHECK(labels == expected);
    CHECK(labels == oracle.occluded);
}

TEST_CASE("build_order_matrix: invariants over random scenes") {
    const auto specs = generate_random(2002, 80, {});
    for (const auto& spec : specs) {
        const auto instances = rendered_instances(spec);
        const OrderMatrix m = build_order_matrix(instances);
        CHECK(m.antisymmetric());
        CHECK(m.zero_diagonal());

        // Gate soundness: a pair with empty box intersection or an absent
        // in-IA mask contributes only zeros.
        for (std::size_t i = 0; i < instances.size(); ++i) {
            for (std::size_t j = i + 1; j < instances.size(); ++j) {
                const BBox ia = intersection(instances[i].bbox, instances[j].bbox);
                if (ia.is_empty() || count_in(instances[i].mask, ia) == 0 ||
                    count_in(instances[j].mask, ia) == 0)
                    CHECK(m.at(i, j) == 0);
            }
        }
    }
}

TEST_CASE("build_order_matrix: permutation equivariance") {
    testsupport::SplitMix64 rng(2003);
    const auto specs = generate_random(2003, 30, {});
    for (const auto& spec : specs) {
        const auto instances = rendered_instances(spec);
        const OrderMatrix base = build_order_matrix(instances);

        std::vector<std::size_t> perm(instances.size());
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = perm.size(); k > 1; --k)
            std::swap(perm[k - 1],
                      perm[static_cast<std::size_t>(rng.next_int(0, static_cast<std::int64_t>(k) - 1))]);

        std::vector<Instance> shuffled(instances.size());
        for (std::size_t k = 0; k < perm.size(); ++k) shuffled[k] = instances[perm[k]];

        const OrderMatrix permuted = build_order_matrix(shuffled);
        for (std::size_t i = 0; i < perm.size(); ++i)
            for (std::size_t j = 0; j < perm.size(); ++j)
                CHECK(permuted.at(i, j) == base.at(perm[i], perm[j]));
    }
}

TEST_CASE("build_order_matrix: parallel evaluation is bitwise identical") {
    const auto specs = generate_random(2004, 10, {});
    for (const auto& spec : specs) {
        const auto instances = rendered_instances(spec);
        const OrderMatrix sequential = build_order_matrix(instances, {}, 1);
        CHECK(build_order_matrix(instances, {}, 4) == sequential);
        CHECK(build_order_matrix(instances, {}, 8) == sequential);
    }
}

TEST_CASE("detect_occluded: row semantics") {
    CHECK(detect_occluded(OrderMatrix(3)) == std::vector<bool>{false, false, false});

    OrderMatrix m(2);
    m.set_pair(0, 1, 1);
    CHECK(detect_occluded(m) == std::vector<bool>{false, true});

    // Equivalent to a brute-force row scan on random matrices.
    testsupport::SplitMix64 rng(2005);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.next_int(0, 12));
        OrderMatrix random(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                random.set_pair(i, j, static_cast<int>(rng.next_int(-1, 1)));
        const auto labels = detect_occluded(random);
        for (std::size_t i = 0; i < n; ++i) {
            bool has_minus = false;
            for (std::size_t j = 0; j < n; ++j)
                if (random.at(i, j) == -1) has_minus = true;
            CHECK(labels[i] == has_minus);
        }
    }
}
