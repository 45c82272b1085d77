#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pesp/engine.hpp"
#include "pesp/oracle.hpp"

#include <random>

using namespace pesp;

TEST_CASE("integer optimum of the reference instance") {
    PespInstance inst = testutil::two_lines_instance();
    auto [value, witness] = ip_optimum(inst, {});
    CHECK(value == Rat(210));
    // the witness is an integer-feasible tension achieving the value
    Rat wx = 0;
    for (const Arc& a : inst.arcs) {
        Rat x = witness.at(a.id);
        CHECK(x >= Rat(a.lower));
        CHECK(x <= Rat(a.upper));
        wx += a.weight * x;
    }
    CHECK(wx == Rat(210));
    std::map<int, Rat> zero_key;
    for (const Arc& a : inst.arcs) zero_key[a.id] = 0;
    CycleBasis basis = fundamental_basis(inst, min_spanning_tree(inst, zero_key));
    for (const OrientedCycle& g : basis.cycles) {
        Rat v = cycle_value(g, witness);
        CHECK(mod_period(v, inst.period) == Rat(0));
    }
}

TEST_CASE("acyclic instances collapse to the box bound") {
    PespInstance inst;
    inst.period = 10;
    inst.nodes = {1, 2, 3};
    inst.arcs = {{1, 1, 2, 2, 5, Rat(3)}, {2, 2, 3, 1, 4, Rat(2)}};
    auto [value, witness] = ip_optimum(inst, {});
    CHECK(value == Rat(8));  // w^T l
    auto [sc, point] = split_closure_optimum(inst, {});
    CHECK(sc == Rat(8));
}

TEST_CASE("empty cycle slab is reported infeasible") {
    // two parallel arcs whose difference can never be a multiple of T
    PespInstance inst;
    inst.period = 10;
    inst.nodes = {1, 2};
    inst.arcs = {{1, 1, 2, 0, 1, Rat(1)}, {2, 1, 2, 3, 8, Rat(1)}};
    CHECK_THROWS_AS(ip_optimum(inst, {}), OracleError);
}

TEST_CASE("sandwich: box <= split closure <= integer optimum") {
    std::mt19937 rng(801);
    for (int trial = 0; trial < 12; ++trial) {
        auto [inst, witness] = testutil::random_instance(rng, 5, 2, 8);
        Rat box = inst.objective_offset;
        for (const Arc& a : inst.arcs) box += a.weight * a.lower;
        Rat sc = split_closure_optimum(inst, {}).first;
        Rat ip = ip_optimum(inst, {}).first;
        CHECK(box <= sc);
        CHECK(sc <= ip);
    }
}

TEST_CASE("split closure is tight on cacti") {
    std::mt19937 rng(802);
    for (int trial = 0; trial < 8; ++trial) {
        auto [inst, witness] = testutil::random_cactus(rng, 3, 8);
        Rat sc = split_closure_optimum(inst, {}).first;
        Rat ip = ip_optimum(inst, {}).first;
        CHECK(sc == ip);
    }
}

TEST_CASE("engine certificate matches the split-closure oracle") {
    PespInstance inst = testutil::two_lines_instance();
    Report r = run(inst, {});
    REQUIRE(r.status != EngineStatus::TimeLimit);
    Rat sc = split_closure_optimum(inst, {}).first;
    CHECK(r.bound_wx == Catch::Approx(to_double(sc)).margin(1e-6));
}

TEST_CASE("brute-force flip set agrees with the closed-form separator") {
    std::mt19937 rng(803);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto [inst, witness] = testutil::random_instance(rng, 5, 2, 10);
        Tension x = testutil::random_point(rng, inst);
        for (const OrientedCycle& g : simple_cycles(inst, 4096)) {
            auto best = best_F_bruteforce(inst, g, x, {});
            auto cut = separate_fixed_cycle(inst, g, x, Rat(0), Rat(0));
            if (cut) {
                REQUIRE(best.has_value());
                CHECK(violation(*cut, x) == best->second);
                ++checked;
            } else if (best) {
                CHECK(best->second <= Rat(0));
            }
        }
    }
    CHECK(checked > 0);  // the comparison must actually trigger
}

TEST_CASE("F-subset budget guard") {
    PespInstance inst = testutil::two_lines_instance();
    OrientedCycle g2;
    g2.entries = {{2, 1}, {5, 1}, {9, 1}, {10, 1}};
    Tension x;
    for (const Arc& a : inst.arcs) x[a.id] = Rat(a.lower);
    OracleBudget tiny;
    tiny.max_F_exponent = 2;
    CHECK_THROWS_AS(best_F_bruteforce(inst, g2, x, tiny), OracleError);
}

TEST_CASE("subdivision maps invert each other") {
    std::mt19937 rng(804);
    for (int trial = 0; trial < 100; ++trial) {
        int64_t l1 = rng() % 5, u1 = l1 + rng() % 6;
        int64_t l2 = rng() % 5, u2 = l2 + rng() % 6;
        // a point of the combined interval [l1+l2, u1+u2]
        int64_t span = (u1 + u2) - (l1 + l2);
        Rat x = Rat(l1 + l2) + Rat(static_cast<int64_t>(rng() % (4 * span + 1)), 4);
        auto [x1, x2] = subdivision_s(x, l1, u1, l2, u2);
        CHECK(x1 >= Rat(l1));
        CHECK(x1 <= Rat(u1));
        CHECK(x2 >= Rat(l2));
        CHECK(x2 <= Rat(u2));
        CHECK(subdivision_rho(x1, x2) == x);
    }
}

TEST_CASE("projection checks hold on random instances") {
    std::mt19937 rng(805);
    for (int trial = 0; trial < 4; ++trial) {
        auto [inst, witness] = testutil::random_instance(rng, 4, 2, 6);
        CHECK(projection_check(inst, Transform::Identity, {}));
        CHECK(projection_check(inst, Transform::Subdivide, {}));
    }
    auto [small, witness] = testutil::random_instance(rng, 4, 1, 6);
    CHECK(projection_check(small, Transform::FreeAugment, {}));
}
