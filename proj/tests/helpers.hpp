#ifndef pesp_tests_helpers_hpp
#define pesp_tests_helpers_hpp

#include "pesp/instance.hpp"
#include "pesp/rational.hpp"

#include <random>
#include <vector>

namespace testutil {

using namespace pesp;

// Two parallel train lines of four stations each (T = 10): three driving
// arcs per line, two turnaround connectors, two transfers. mu = 3.
inline PespInstance two_lines_instance() {
    PespInstance inst;
    inst.period = 10;
    inst.nodes = {1, 2, 3, 4, 5, 6, 7, 8};
    inst.arcs = {
        {1, 1, 2, 1, 2, Rat(11)},   {2, 2, 3, 3, 6, Rat(11)},  {3, 3, 4, 1, 2, Rat(11)},
        {4, 8, 7, 1, 2, Rat(11)},   {5, 7, 6, 3, 6, Rat(11)},  {6, 6, 5, 1, 2, Rat(11)},
        {7, 4, 8, 1, 10, Rat(10)},  {8, 5, 1, 1, 10, Rat(10)}, {9, 6, 2, 3, 12, Rat(0)},
        {10, 3, 7, 3, 12, Rat(0)},
    };
    return inst;
}

// The optimal periodic tension of the two-lines instance (w^T x = 210).
inline Tension two_lines_tension() {
    return {{1, 1}, {2, 3}, {3, 1}, {4, 1}, {5, 3},
            {6, 1}, {7, 9}, {8, 1}, {9, 3}, {10, 11}};
}

// Two parallel arcs between the same pair of nodes, both [0, 9] at T = 10;
// gamma = a1 - a2 is the only simple cycle.
inline PespInstance two_arc_instance() {
    PespInstance inst;
    inst.period = 10;
    inst.nodes = {1, 2};
    inst.arcs = {{1, 1, 2, 0, 9, Rat(1)}, {2, 1, 2, 0, 9, Rat(1)}};
    return inst;
}

// Random connected instance that is feasible by construction: a timetable is
// sampled first and every arc's bounds are drawn around the induced tension.
struct RandomInstance {
    PespInstance instance;
    Tension witness;  // integer-feasible tension
};

inline RandomInstance random_instance(std::mt19937& rng, int num_nodes, int extra_arcs,
                                      int64_t T) {
    PespInstance inst;
    inst.period = T;
    std::uniform_int_distribution<int64_t> pi_dist(0, T - 1);
    std::map<int, int64_t> pi;
    for (int v = 1; v <= num_nodes; ++v) {
        inst.nodes.push_back(v);
        pi[v] = pi_dist(rng);
    }
    std::vector<std::pair<int, int>> ends;
    for (int v = 2; v <= num_nodes; ++v) {
        std::uniform_int_distribution<int> parent(1, v - 1);
        int p = parent(rng);
        if (rng() % 2)
            ends.push_back({p, v});
        else
            ends.push_back({v, p});
    }
    std::uniform_int_distribution<int> node_dist(1, num_nodes);
    for (int k = 0; k < extra_arcs; ++k) {
        int i = node_dist(rng), j = node_dist(rng);
        if (i == j) j = i == num_nodes ? 1 : i + 1;
        ends.push_back({i, j});
    }
    Tension witness;
    std::uniform_int_distribution<int64_t> weight_dist(0, 10);
    int id = 1;
    for (auto [i, j] : ends) {
        int64_t x = mod_period(pi[j] - pi[i], T);
        std::uniform_int_distribution<int64_t> below(0, x);
        int64_t lo = x - below(rng);
        std::uniform_int_distribution<int64_t> above(0, T - 1 - (x - lo));
        int64_t hi = x + above(rng);
        inst.arcs.push_back({id, i, j, lo, hi, Rat(weight_dist(rng))});
        witness[id] = Rat(x);
        ++id;
    }
    return {preprocess(inst), witness};
}

// Random point of the bound box (quarter-integral, deterministic per rng).
inline Tension random_point(std::mt19937& rng, const PespInstance& inst) {
    Tension x;
    std::uniform_int_distribution<int> step(0, 8);
    for (const Arc& a : inst.arcs)
        x[a.id] = Rat(a.lower) + Rat(a.upper - a.lower) * Rat(step(rng), 8);
    return x;
}

// Random cactus: blocks are single cycles (mu = 1 each) or bridge arcs,
// attached at existing vertices; feasible by construction like above.
inline RandomInstance random_cactus(std::mt19937& rng, int num_blocks, int64_t T) {
    PespInstance inst;
    inst.period = T;
    std::uniform_int_distribution<int64_t> pi_dist(0, T - 1);
    std::map<int, int64_t> pi;
    int next_node = 1;
    auto add_node = [&] {
        inst.nodes.push_back(next_node);
        pi[next_node] = pi_dist(rng);
        return next_node++;
    };
    add_node();
    Tension witness;
    int next_arc = 1;
    std::uniform_int_distribution<int64_t> weight_dist(0, 10);
    auto add_arc = [&](int i, int j) {
        int64_t x = mod_period(pi[j] - pi[i], T);
        std::uniform_int_distribution<int64_t> below(0, x);
        int64_t lo = x - below(rng);
        std::uniform_int_distribution<int64_t> above(0, T - 1 - (x - lo));
        int64_t hi = x + above(rng);
        inst.arcs.push_back({next_arc, i, j, lo, hi, Rat(weight_dist(rng))});
        witness[next_arc] = Rat(x);
        ++next_arc;
    };
    for (int b = 0; b < num_blocks; ++b) {
        std::uniform_int_distribution<size_t> pick(0, inst.nodes.size() - 1);
        int anchor = inst.nodes[pick(rng)];
        if (rng() % 3 == 0) {
            add_arc(anchor, add_node());  // bridge block, mu = 0
        } else {
            std::uniform_int_distribution<int> len(2, 4);  // cycle block, mu = 1
            int steps = len(rng);
            int prev = anchor;
            for (int s = 0; s + 1 < steps; ++s) {
                int v = add_node();
                if (rng() % 2)
                    add_arc(prev, v);
                else
                    add_arc(v, prev);
                prev = v;
            }
            if (rng() % 2)
                add_arc(prev, anchor);
            else
                add_arc(anchor, prev);
        }
    }
    return {preprocess(inst), witness};
}

}  // namespace testutil

#endif
