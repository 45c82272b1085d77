#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pesp/engine.hpp"

#include <random>

using namespace pesp;

TEST_CASE("integral root LP terminates immediately") {
    PespInstance inst = testutil::two_arc_instance();  // x = l is integral
    Report r = run(inst, {});
    CHECK(r.status == EngineStatus::IntegralLp);
    CHECK(r.cuts_total == 0);
    CHECK(r.bound_wx == Catch::Approx(0.0));
    CHECK(r.point.at(1) == Rat(0));
    CHECK(r.point.at(2) == Rat(0));
}

TEST_CASE("engine improves the trivial bound on the reference instance") {
    PespInstance inst = testutil::two_lines_instance();
    EngineConfig config;
    Report r = run(inst, config);
    // the cuts close the gap fully here and the terminal point is integral
    CHECK(r.status != EngineStatus::TimeLimit);
    CHECK(r.bound_wx > 130.0 + 1e-6);   // beats w^T l
    CHECK(r.bound_wx <= 210.0 + 1e-6);  // never exceeds the optimum
    CHECK(r.cuts_total > 0);
    CHECK(r.bound_slack == Catch::Approx(r.bound_wx - 130.0));
    // terminal point is in the box
    for (const Arc& a : inst.arcs) {
        CHECK(r.point.at(a.id) >= Rat(a.lower));
        CHECK(r.point.at(a.id) <= Rat(a.upper));
    }
}

TEST_CASE("log bounds are non-decreasing") {
    PespInstance inst = testutil::two_lines_instance();
    Report r = run(inst, {});
    REQUIRE_FALSE(r.log.empty());
    for (size_t i = 0; i + 1 < r.log.size(); ++i)
        CHECK(r.log[i + 1].lp_bound_wx >= r.log[i].lp_bound_wx - 1e-6);
    CHECK(r.log.back().iteration == static_cast<int>(r.log.size()) - 1);
}

TEST_CASE("heuristic-only mode never claims optimality") {
    PespInstance inst = testutil::two_lines_instance();
    EngineConfig config;
    config.heuristic_only = true;
    Report r = run(inst, config);
    CHECK(r.status != EngineStatus::SplitClosureOptimal);
    CHECK(r.cuts_exact == 0);
}

TEST_CASE("bound never exceeds a feasible integer objective") {
    std::mt19937 rng(701);
    for (int trial = 0; trial < 10; ++trial) {
        auto [inst, witness] = testutil::random_instance(rng, 6, 3, 10);
        Report r = run(inst, {});
        Rat wx = inst.objective_offset;
        for (const Arc& a : inst.arcs) wx += a.weight * witness.at(a.id);
        CHECK(r.bound_wx <= to_double(wx) + 1e-6);
    }
}

TEST_CASE("ascending alpha order reaches the same certificate") {
    PespInstance inst = testutil::two_lines_instance();
    EngineConfig asc;
    asc.alpha_order = AlphaOrder::Ascending;
    Report a = run(inst, asc);
    Report d = run(inst, {});
    REQUIRE(a.status != EngineStatus::TimeLimit);
    REQUIRE(d.status != EngineStatus::TimeLimit);
    CHECK(a.bound_wx == Catch::Approx(d.bound_wx).margin(1e-6));
}

TEST_CASE("pool filter dedups, caps and rejects parallel candidates") {
    PespInstance inst = testutil::two_arc_instance();
    Tension x{{1, Rat(2)}, {2, Rat(0)}};
    OrientedCycle g;
    g.entries = {{1, 1}, {2, -1}};
    FlipCut real = flip_cut(inst, g, {1});

    EngineConfig config;

    // duplicate of a pooled cut is dropped
    std::vector<detail::PoolEntry> pool{{real, cut_key(inst, real.gamma, real.F), false, 0}};
    CHECK(pool_filter(inst, pool, {real}, x, config).empty());

    // near-parallel candidates collapse to one
    FlipCut clone = real;
    clone.F.insert(2);  // different provenance key, same coefficients
    std::vector<FlipCut> cands{real, clone};
    CHECK(pool_filter(inst, {}, cands, x, config).size() == 1);

    // the per-round cap binds
    config.max_cuts_per_round = 1;
    FlipCut other = real;
    other.F.insert(2);
    other.coefficients[1] = Rat(5);  // no longer parallel
    CHECK(pool_filter(inst, {}, {real, other}, x, config).size() == 1);
}

TEST_CASE("block decomposition") {
    SECTION("biconnected instance is a single block") {
        PespInstance inst = testutil::two_lines_instance();
        auto blocks = decompose_by_blocks(inst);
        REQUIRE(blocks.size() == 1);
        CHECK(blocks[0].arcs.size() == 10);
    }
    SECTION("two triangles joined at a vertex") {
        PespInstance inst;
        inst.period = 10;
        inst.nodes = {1, 2, 3, 4, 5};
        auto arc = [](int id, int t, int h) { return Arc{id, t, h, 0, 9, Rat(1)}; };
        inst.arcs = {arc(1, 1, 2), arc(2, 2, 3), arc(3, 3, 1),
                     arc(4, 3, 4), arc(5, 4, 5), arc(6, 5, 3)};
        auto blocks = decompose_by_blocks(inst);
        REQUIRE(blocks.size() == 2);
        CHECK(blocks[0].arcs.size() == 3);
        CHECK(blocks[1].arcs.size() == 3);
        CHECK(blocks[0].arcs.front().id == 1);  // sorted by lowest arc id
        CHECK(blocks[1].arcs.front().id == 4);
    }
    SECTION("every bridge is its own block") {
        PespInstance inst;
        inst.period = 10;
        inst.nodes = {1, 2, 3, 4};
        auto arc = [](int id, int t, int h) { return Arc{id, t, h, 1, 3, Rat(1)}; };
        inst.arcs = {arc(1, 1, 2), arc(2, 2, 3), arc(3, 3, 4)};
        auto blocks = decompose_by_blocks(inst);
        REQUIRE(blocks.size() == 3);
        for (const auto& b : blocks) CHECK(b.arcs.size() == 1);
    }
}

TEST_CASE("block solve matches the monolithic solve") {
    std::mt19937 rng(702);
    for (int trial = 0; trial < 5; ++trial) {
        auto [inst, witness] = testutil::random_cactus(rng, 3, 8);
        Report whole = run(inst, {});
        Report split = run_by_blocks(inst, {});
        CHECK(split.bound_wx == Catch::Approx(whole.bound_wx).margin(1e-6));
        for (const Arc& a : inst.arcs) CHECK(split.point.count(a.id) == 1);
    }
}
