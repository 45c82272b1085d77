#ifndef pesp_cycles_hpp
#define pesp_cycles_hpp

#include "pesp/instance.hpp"
#include "pesp/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace pesp {

// Sparse signed incidence vector over arcs; an element of the cycle space.
struct OrientedCycle {
    std::map<int, int> entries;  // arc id -> coefficient

    int length() const {
        int n = 0;
        for (const auto& [id, c] : entries)
            if (c != 0) ++n;
        return n;
    }

    int coeff(int arc_id) const {
        auto it = entries.find(arc_id);
        return it == entries.end() ? 0 : it->second;
    }

    bool is_zero() const { return length() == 0; }

    OrientedCycle negated() const {
        OrientedCycle g;
        for (const auto& [id, c] : entries)
            if (c != 0) g.entries[id] = -c;
        return g;
    }

    bool operator==(const OrientedCycle& o) const {
        OrientedCycle a = *this, b = o;
        std::erase_if(a.entries, [](const auto& kv) { return kv.second == 0; });
        std::erase_if(b.entries, [](const auto& kv) { return kv.second == 0; });
        return a.entries == b.entries;
    }
};

// Flips the sign so that the lowest-id nonzero entry is positive.
inline OrientedCycle canonical_orientation(const OrientedCycle& g) {
    for (const auto& [id, c] : g.entries) {
        if (c == 0) continue;
        return c > 0 ? g : g.negated();
    }
    return g;
}

struct SpanningTree {
    int root = 0;
    std::set<int> tree_arcs;
    // node -> (parent node, connecting arc id); root has no entry
    std::map<int, std::pair<int, int>> parent;
};

struct CycleBasis {
    SpanningTree tree;
    std::vector<int> cotree_arcs;        // defining co-tree arc per cycle
    std::vector<OrientedCycle> cycles;   // cycle k has coefficient +1 on cotree_arcs[k]

    size_t size() const { return cycles.size(); }
};

inline bool is_circulation(const PespInstance& inst, const OrientedCycle& g) {
    std::map<int, long long> balance;
    for (const auto& [id, c] : g.entries) {
        if (c == 0) continue;
        const Arc& a = inst.arc(id);
        balance[a.tail] += c;
        balance[a.head] -= c;
    }
    for (const auto& [node, b] : balance)
        if (b != 0) return false;
    return true;
}

template <typename V>
inline V cycle_value(const OrientedCycle& g, const std::map<int, V>& values) {
    V sum{};
    for (const auto& [id, c] : g.entries) {
        if (c == 0) continue;
        sum += V(c) * values.at(id);
    }
    return sum;
}

// Kruskal MST of the underlying undirected graph; ties broken by arc id.
inline SpanningTree min_spanning_tree(const PespInstance& inst,
                                      const std::map<int, Rat>& arc_key) {
    std::vector<const Arc*> order;
    for (const Arc& a : inst.arcs) order.push_back(&a);
    std::sort(order.begin(), order.end(), [&](const Arc* a, const Arc* b) {
        const Rat &ka = arc_key.at(a->id), &kb = arc_key.at(b->id);
        if (ka != kb) return ka < kb;
        return a->id < b->id;
    });

    std::map<int, int> uf;
    for (int v : inst.nodes) uf[v] = v;
    std::function<int(int)> find = [&](int v) {
        while (uf[v] != v) v = uf[v] = uf[uf[v]];
        return v;
    };

    SpanningTree tree;
    std::map<int, std::vector<std::pair<int, int>>> adj;  // node -> (neighbor, arc id)
    for (const Arc* a : order) {
        int ra = find(a->tail), rb = find(a->head);
        if (ra == rb) continue;
        uf[ra] = rb;
        tree.tree_arcs.insert(a->id);
        adj[a->tail].push_back({a->head, a->id});
        adj[a->head].push_back({a->tail, a->id});
    }
    if (tree.tree_arcs.size() + 1 != inst.nodes.size())
        throw InstanceError("spanning tree does not exist: graph is disconnected");

    tree.root = inst.nodes.empty() ? 0 : inst.nodes.front();
    std::vector<int> stack{tree.root};
    std::set<int> seen{tree.root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [w, id] : adj[v]) {
            if (seen.count(w)) continue;
            seen.insert(w);
            tree.parent[w] = {v, id};
            stack.push_back(w);
        }
    }
    return tree;
}

namespace detail {

// Signed arc sequence along the tree path from -> to.
inline void tree_path(const PespInstance& inst, const SpanningTree& tree, int from, int to,
                      OrientedCycle& out, int scale) {
    // depth of each node via parent pointers
    auto depth = [&](int v) {
        int d = 0;
        while (tree.parent.count(v)) {
            v = tree.parent.at(v).first;
            ++d;
        }
        return d;
    };
    int a = from, b = to;
    int da = depth(a), db = depth(b);
    std::vector<std::pair<int, int>> up_a, up_b;  // (arc id, direction sign w.r.t. walking up)
    auto step_up = [&](int& v, std::vector<std::pair<int, int>>& seq) {
        auto [p, id] = tree.parent.at(v);
        const Arc& arc = inst.arc(id);
        // walking from v to p: forward if arc points v -> p
        seq.push_back({id, arc.tail == v ? +1 : -1});
        v = p;
    };
    while (da > db) { step_up(a, up_a); --da; }
    while (db > da) { step_up(b, up_b); --db; }
    while (a != b) { step_up(a, up_a); step_up(b, up_b); }
    // path from -> to: up from 'from' to the meeting node, then down to 'to'
    for (auto [id, s] : up_a) out.entries[id] += scale * s;
    for (auto it = up_b.rbegin(); it != up_b.rend(); ++it)
        out.entries[it->first] += scale * -it->second;
}

}  // namespace detail

// Fundamental cycles of the tree, one per co-tree arc a, oriented with
// coefficient +1 on a. Co-tree arcs in ascending id order.
inline CycleBasis fundamental_basis(const PespInstance& inst, const SpanningTree& tree) {
    CycleBasis basis;
    basis.tree = tree;
    std::vector<const Arc*> cotree;
    for (const Arc& a : inst.arcs)
        if (!tree.tree_arcs.count(a.id)) cotree.push_back(&a);
    std::sort(cotree.begin(), cotree.end(),
              [](const Arc* a, const Arc* b) { return a->id < b->id; });
    for (const Arc* a : cotree) {
        OrientedCycle g;
        g.entries[a->id] = 1;
        detail::tree_path(inst, tree, a->head, a->tail, g, 1);
        std::erase_if(g.entries, [](const auto& kv) { return kv.second == 0; });
        basis.cotree_arcs.push_back(a->id);
        basis.cycles.push_back(std::move(g));
    }
    return basis;
}

// Orientation-preserving decomposition into simple oriented cycles: peel
// directed cycles from the nonnegative circulation on the reversed-arc
// digraph.
inline std::vector<OrientedCycle> decompose(const PespInstance& inst, const OrientedCycle& g) {
    if (!is_circulation(inst, g)) throw InstanceError("decompose: input is not a circulation");
    // residual multiplicities in the reversed-arc digraph
    std::map<int, int> rem;  // arc id -> |gamma_a| remaining
    std::map<int, std::vector<std::pair<int, int>>> out_arcs;  // node -> (target, arc id)
    std::map<int, int> sign;
    for (const auto& [id, c] : g.entries) {
        if (c == 0) continue;
        const Arc& a = inst.arc(id);
        rem[id] = std::abs(c);
        sign[id] = c > 0 ? +1 : -1;
        if (c > 0)
            out_arcs[a.tail].push_back({a.head, id});
        else
            out_arcs[a.head].push_back({a.tail, id});
    }
    for (auto& [v, lst] : out_arcs)
        std::sort(lst.begin(), lst.end(),
                  [](const auto& x, const auto& y) { return x.second < y.second; });

    std::vector<OrientedCycle> parts;
    auto next_start = [&]() -> int {
        for (const auto& [id, r] : rem)
            if (r > 0) return id;
        return -1;
    };
    while (true) {
        int start_arc = next_start();
        if (start_arc < 0) break;
        const Arc& sa = inst.arc(start_arc);
        int start = sign[start_arc] > 0 ? sa.tail : sa.head;
        // walk forward until a vertex repeats, then extract that loop
        std::vector<std::pair<int, int>> walk;  // (node, arc id taken from node)
        std::map<int, int> pos;                 // node -> index in walk
        int v = start;
        while (!pos.count(v)) {
            pos[v] = static_cast<int>(walk.size());
            int chosen = -1, target = -1;
            for (auto [w, id] : out_arcs[v]) {
                if (rem[id] > 0) {
                    chosen = id;
                    target = w;
                    break;
                }
            }
            if (chosen < 0) throw InstanceError("decompose: circulation bookkeeping failed");
            walk.push_back({v, chosen});
            v = target;
        }
        OrientedCycle part;
        for (size_t i = pos[v]; i < walk.size(); ++i) {
            int id = walk[i].second;
            part.entries[id] += sign[id];
            rem[id] -= 1;
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

// Enumerates all simple cycles of the underlying undirected graph, each once
// in canonical orientation. Anchored DFS: each cycle is reported from its
// lowest arc id.
inline std::vector<OrientedCycle> simple_cycles(const PespInstance& inst, size_t limit) {
    std::vector<const Arc*> arcs;
    for (const Arc& a : inst.arcs) arcs.push_back(&a);
    std::sort(arcs.begin(), arcs.end(), [](const Arc* a, const Arc* b) { return a->id < b->id; });
    std::map<int, std::vector<const Arc*>> adj;
    for (const Arc* a : arcs) {
        adj[a->tail].push_back(a);
        adj[a->head].push_back(a);
    }
    std::vector<OrientedCycle> found;
    for (size_t k = 0; k < arcs.size(); ++k) {
        const Arc* anchor = arcs[k];
        // simple paths from anchor->head back to anchor->tail using arcs with larger id
        std::set<int> visited{anchor->head};
        OrientedCycle current;
        current.entries[anchor->id] = 1;
        std::function<void(int)> dfs = [&](int v) {
            if (v == anchor->tail) {
                found.push_back(canonical_orientation(current));
                if (found.size() > limit) throw InstanceError("simple cycle limit exceeded");
                return;
            }
            for (const Arc* a : adj[v]) {
                if (a->id <= anchor->id) continue;
                if (current.coeff(a->id) != 0) continue;
                int w = a->tail == v ? a->head : a->tail;
                if (visited.count(w) && w != anchor->tail) continue;
                if (w == anchor->head) continue;
                current.entries[a->id] = a->tail == v ? +1 : -1;
                if (w != anchor->tail) visited.insert(w);
                dfs(w);
                current.entries.erase(a->id);
                if (w != anchor->tail) visited.erase(w);
            }
        };
        if (anchor->head == anchor->tail) continue;
        dfs(anchor->head);
    }
    return found;
}

// Integer combination sum_k coeff_k * basis_k.
inline OrientedCycle combine(const CycleBasis& basis, const std::vector<int>& coeffs) {
    OrientedCycle g;
    for (size_t k = 0; k < basis.cycles.size(); ++k) {
        if (coeffs[k] == 0) continue;
        for (const auto& [id, c] : basis.cycles[k].entries) g.entries[id] += coeffs[k] * c;
    }
    std::erase_if(g.entries, [](const auto& kv) { return kv.second == 0; });
    return g;
}

}  // namespace pesp

#endif
