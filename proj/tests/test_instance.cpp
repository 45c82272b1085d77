#include "pesp/instance.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace pesp;
using testutil::two_lines_instance;
using testutil::two_lines_tension;

TEST_CASE("preprocess normalizes bounds and accumulates the offset") {
    PespInstance raw;
    raw.period = 10;
    raw.nodes = {1, 2};
    raw.arcs = {{1, 1, 2, 13, 15, Rat(2)}, {2, 2, 1, 3, 12, Rat(1)}};
    PespInstance inst = preprocess(raw);
    CHECK(inst.arc(1).lower == 3);
    CHECK(inst.arc(1).upper == 5);
    CHECK(inst.arc(2).lower == 3);   // 12 < 3 + 10: untouched
    CHECK(inst.arc(2).upper == 12);
    CHECK(inst.objective_offset == Rat(20));  // 2 * 10 * floor(13/10)
}

TEST_CASE("preprocess clamps arcs spanning a full period") {
    PespInstance raw;
    raw.period = 10;
    raw.nodes = {1, 2};
    raw.arcs = {{1, 1, 2, 0, 25, Rat(1)}, {2, 2, 1, 0, 1, Rat(1)}};
    PespInstance inst = preprocess(raw);
    CHECK(inst.arc(1).lower == 0);
    CHECK(inst.arc(1).upper == 9);
}

TEST_CASE("preprocess rejects bad input") {
    PespInstance raw;
    raw.period = 10;
    raw.nodes = {1, 2, 3};
    raw.arcs = {{1, 1, 2, 0, 1, Rat(1)}};  // node 3 disconnected
    CHECK_THROWS_AS(preprocess(raw), InstanceError);
    raw.nodes = {1, 2};
    raw.period = 1;
    CHECK_THROWS_AS(preprocess(raw), InstanceError);
    raw.period = 10;
    raw.arcs = {{1, 1, 2, 5, 3, Rat(1)}};
    CHECK_THROWS_AS(preprocess(raw), InstanceError);
}

TEST_CASE("preprocess is idempotent") {
    PespInstance inst = preprocess(two_lines_instance());
    PespInstance twice = preprocess(inst);
    REQUIRE(twice.arcs.size() == inst.arcs.size());
    for (const Arc& a : inst.arcs) {
        CHECK(twice.arc(a.id).lower == a.lower);
        CHECK(twice.arc(a.id).upper == a.upper);
    }
    CHECK(twice.objective_offset == inst.objective_offset);
}

TEST_CASE("flip_arcs reverses bounds and weight, and is an involution") {
    PespInstance inst = two_lines_instance();
    auto [flipped, map1] = flip_arcs(inst, {1});
    const Arc& f = flipped.arc(map1.at(1));
    CHECK(f.tail == 2);
    CHECK(f.head == 1);
    CHECK(f.lower == -2);
    CHECK(f.upper == -1);
    CHECK(f.weight == Rat(-11));
    auto [back, map2] = flip_arcs(flipped, {map1.at(1)});
    const Arc& b = back.arc(map2.at(map1.at(1)));
    CHECK(b.tail == 1);
    CHECK(b.head == 2);
    CHECK(b.lower == 1);
    CHECK(b.upper == 2);
    CHECK(b.weight == Rat(11));

    auto [same, map3] = flip_arcs(inst, {});
    CHECK(same.arcs.size() == inst.arcs.size());
    (void)map3;
}

TEST_CASE("free_augment adds a star over all original nodes") {
    PespInstance inst = two_lines_instance();
    PespInstance aug = free_augment(inst);
    CHECK(aug.nodes.size() == 9);
    CHECK(aug.arcs.size() == 18);
    CHECK(aug.mu() == 10);
    for (const Arc& a : aug.arcs) {
        if (a.id <= 10) continue;
        CHECK(a.lower == 0);
        CHECK(a.upper == 9);
        CHECK(a.weight == Rat(0));
    }
}

TEST_CASE("subdivide splits bounds and inherits the weight") {
    PespInstance inst = two_lines_instance();
    // transfer arc [3,12] split per the two-part shape with u <= T
    PespInstance sub = subdivide(inst, 9, 2, 6, 1, 6);
    CHECK(sub.arcs.size() == 11);
    CHECK(sub.nodes.size() == 9);
    const Arc& a1 = sub.arc(11);
    const Arc& a2 = sub.arc(12);
    CHECK(a1.tail == 6);
    CHECK(a2.head == 2);
    CHECK(a1.head == a2.tail);
    CHECK(a1.lower == 2);
    CHECK(a1.upper == 6);
    CHECK(a2.lower == 1);
    CHECK(a2.upper == 6);
    CHECK(a1.weight == inst.arc(9).weight);
    CHECK(a2.weight == inst.arc(9).weight);

    // degenerate second part is allowed
    PespInstance deg = subdivide(inst, 1, 1, 2, 0, 0);
    CHECK(deg.arc(12).lower == 0);
    CHECK(deg.arc(12).upper == 0);

    CHECK_THROWS_AS(subdivide(inst, 9, 1, 6, 1, 6), InstanceError);  // l1+l2 != l
}

TEST_CASE("binarize caps every upper bound at the period") {
    PespInstance inst = two_lines_instance();
    PespInstance bin = binarize(inst);
    CHECK(bin.arcs.size() == 12);  // the two transfer arcs get split
    for (const Arc& a : bin.arcs) {
        CHECK(a.upper <= 10);
        CHECK(a.upper > a.lower);
    }
    // all-u-<=-T instance is untouched
    PespInstance small = testutil::two_arc_instance();
    CHECK(binarize(small).arcs.size() == 2);
}

TEST_CASE("restrict_to_mu removes max-span min-weight arcs, skipping bridges") {
    PespInstance inst = two_lines_instance();
    REQUIRE(inst.mu() == 3);
    PespInstance same = restrict_to_mu(inst, 3);
    CHECK(same.arcs.size() == 10);

    // spans 9 on arcs 7,8 (w=10) and 9,10 (w=0): lowest weight goes first
    PespInstance r2 = restrict_to_mu(inst, 2);
    CHECK(r2.arcs.size() == 9);
    CHECK(r2.mu() == 2);
    CHECK(!r2.has_arc(9));

    PespInstance r0 = restrict_to_mu(inst, 0);
    CHECK(r0.mu() == 0);
    CHECK(is_weakly_connected(r0));
    CHECK_THROWS_AS(restrict_to_mu(inst, -1), InstanceError);
}

TEST_CASE("evaluate_objective returns both objective forms") {
    PespInstance inst = two_lines_instance();
    auto [wx, slack] = evaluate_objective(inst, two_lines_tension());
    CHECK(wx == Rat(210));
    CHECK(slack == Rat(80));

    Tension at_lower;
    for (const Arc& a : inst.arcs) at_lower[a.id] = Rat(a.lower);
    auto [wl, sl] = evaluate_objective(inst, at_lower);
    CHECK(wl == Rat(130));
    CHECK(sl == Rat(0));

    Tension bad = two_lines_tension();
    bad[1] = Rat(100);
    CHECK_THROWS_AS(evaluate_objective(inst, bad), InstanceError);
}

TEST_CASE("recover_timetable reproduces the vertex labels") {
    PespInstance inst = two_lines_instance();
    Timetable pi = recover_timetable(inst, two_lines_tension());
    // normalize so that node 1 sits at 0
    Rat shift = pi.at(1);
    auto val = [&](int v) { return mod_period(pi.at(v) - shift, inst.period); };
    CHECK(val(1) == Rat(0));
    CHECK(val(2) == Rat(1));
    CHECK(val(3) == Rat(4));
    CHECK(val(4) == Rat(5));
    CHECK(val(5) == Rat(9));
    CHECK(val(6) == Rat(8));
    CHECK(val(7) == Rat(5));
    CHECK(val(8) == Rat(4));

    Tension bad = two_lines_tension();
    bad[4] = bad[4] + Rat(1, 2);  // non-tree perturbation breaks consistency
    CHECK_THROWS_AS(recover_timetable(inst, bad), InstanceError);
}
