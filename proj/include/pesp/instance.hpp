#ifndef pesp_instance_hpp
#define pesp_instance_hpp

#include "pesp/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pesp {

struct Arc {
    int id;
    int tail;
    int head;
    int64_t lower;
    int64_t upper;
    Rat weight;
};

// A periodic tension / timetable, keyed by arc resp. node id.
using Tension = std::map<int, Rat>;
using Timetable = std::map<int, Rat>;
using ArcSubset = std::set<int>;

class InstanceError : public std::runtime_error {
public:
    explicit InstanceError(const std::string& msg) : std::runtime_error(msg) {}
};

// A periodic event scheduling instance: digraph, per-arc interval bounds and
// weights, and a period. Immutable after construction; transformations
// return new instances.
struct PespInstance {
    std::vector<int> nodes;
    std::vector<Arc> arcs;
    int64_t period = 0;
    Rat objective_offset = 0;

    int64_t mu() const {
        return static_cast<int64_t>(arcs.size()) - static_cast<int64_t>(nodes.size()) + 1;
    }

    const Arc& arc(int id) const {
        for (const Arc& a : arcs)
            if (a.id == id) return a;
        throw InstanceError("unknown arc id " + std::to_string(id));
    }

    bool has_arc(int id) const {
        return std::any_of(arcs.begin(), arcs.end(), [&](const Arc& a) { return a.id == id; });
    }

    int node_index(int node) const {
        auto it = std::find(nodes.begin(), nodes.end(), node);
        if (it == nodes.end()) throw InstanceError("unknown node id " + std::to_string(node));
        return static_cast<int>(it - nodes.begin());
    }

    int max_arc_id() const {
        int m = 0;
        for (const Arc& a : arcs) m = std::max(m, a.id);
        return m;
    }

    int max_node_id() const {
        int m = 0;
        for (int v : nodes) m = std::max(m, v);
        return m;
    }
};

// Weakly connected components, as lists of node ids.
inline std::vector<std::vector<int>> weak_components(const PespInstance& inst) {
    std::map<int, std::vector<int>> adj;
    for (int v : inst.nodes) adj[v];
    for (const Arc& a : inst.arcs) {
        adj[a.tail].push_back(a.head);
        adj[a.head].push_back(a.tail);
    }
    std::set<int> seen;
    std::vector<std::vector<int>> comps;
    for (int v : inst.nodes) {
        if (seen.count(v)) continue;
        std::vector<int> comp;
        std::queue<int> q;
        q.push(v);
        seen.insert(v);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            comp.push_back(u);
            for (int w : adj[u])
                if (!seen.count(w)) {
                    seen.insert(w);
                    q.push(w);
                }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

inline bool is_weakly_connected(const PespInstance& inst) {
    return weak_components(inst).size() <= 1;
}

// Normalizes an instance: drops loops, shifts bounds into 0 <= l < T,
// l <= u < l + T (arcs spanning a full period are unconstrained modulo T
// and get clamped to span T-1), accumulates the shift cost into
// objective_offset, and verifies weak connectivity.
inline PespInstance preprocess(const PespInstance& raw) {
    if (raw.period < 2) throw InstanceError("period must be at least 2");
    PespInstance out;
    out.nodes = raw.nodes;
    out.period = raw.period;
    out.objective_offset = raw.objective_offset;
    const int64_t T = raw.period;
    for (const Arc& a : raw.arcs) {
        if (a.upper < a.lower)
            throw InstanceError("upper < lower on arc " + std::to_string(a.id));
        if (a.tail == a.head) continue;  // loops never constrain a timetable
        Arc b = a;
        int64_t k = floor_div(Int(a.lower), Int(T)).convert_to<int64_t>();
        b.lower = a.lower - k * T;
        b.upper = a.upper - k * T;
        out.objective_offset += b.weight * Rat(k) * Rat(T);
        if (b.upper - b.lower >= T) b.upper = b.lower + T - 1;
        out.arcs.push_back(b);
    }
    std::set<int> ids;
    for (const Arc& a : out.arcs)
        if (!ids.insert(a.id).second)
            throw InstanceError("duplicate arc id " + std::to_string(a.id));
    auto comps = weak_components(out);
    if (comps.size() > 1) {
        std::string msg = "instance is not weakly connected; components:";
        for (const auto& c : comps) {
            msg += " {";
            for (size_t i = 0; i < c.size(); ++i) msg += (i ? "," : "") + std::to_string(c[i]);
            msg += "}";
        }
        throw InstanceError(msg);
    }
    return out;
}

// Reverses the arcs in F, negating bounds and weights. Arc ids are kept, so
// the returned relabeling is the identity on ids.
inline std::pair<PespInstance, std::map<int, int>> flip_arcs(const PespInstance& inst,
                                                             const ArcSubset& F) {
    for (int id : F)
        if (!inst.has_arc(id)) throw InstanceError("unknown arc id " + std::to_string(id));
    PespInstance out = inst;
    std::map<int, int> relabel;
    for (Arc& a : out.arcs) {
        relabel[a.id] = a.id;
        if (F.count(a.id)) {
            std::swap(a.tail, a.head);
            int64_t lo = a.lower, up = a.upper;
            a.lower = -up;
            a.upper = -lo;
            a.weight = -a.weight;
        }
    }
    return {out, relabel};
}

// Adds an apex node connected to every original node by a free arc
// [0, T-1] of weight zero. The star tree's fundamental cycles then read the
// tension of an original arc together with the two incident timetable arcs.
inline PespInstance free_augment(const PespInstance& inst) {
    PespInstance out = inst;
    int s = inst.max_node_id() + 1;
    int next_id = inst.max_arc_id() + 1;
    out.nodes.push_back(s);
    for (int v : inst.nodes)
        out.arcs.push_back(Arc{next_id++, s, v, 0, inst.period - 1, Rat(0)});
    return out;
}

// Replaces arc a by two arcs in series through a fresh node, with the given
// bound split; both parts inherit the weight.
inline PespInstance subdivide(const PespInstance& inst, int arc_id,
                              int64_t l1, int64_t u1, int64_t l2, int64_t u2) {
    const Arc& a = inst.arc(arc_id);
    if (a.lower >= a.upper) throw InstanceError("subdivide requires lower < upper");
    if (l1 < 0 || l1 > u1 || l2 < 0 || l2 > u2 || l1 + l2 != a.lower || u1 + u2 != a.upper)
        throw InstanceError("invalid subdivision bounds for arc " + std::to_string(arc_id));
    PespInstance out = inst;
    int mid = inst.max_node_id() + 1;
    int next_id = inst.max_arc_id() + 1;
    out.nodes.push_back(mid);
    out.arcs.erase(std::remove_if(out.arcs.begin(), out.arcs.end(),
                                  [&](const Arc& b) { return b.id == arc_id; }),
                   out.arcs.end());
    out.arcs.push_back(Arc{next_id, a.tail, mid, l1, u1, a.weight});
    out.arcs.push_back(Arc{next_id + 1, mid, a.head, l2, u2, a.weight});
    return out;
}

// Subdivides every arc with u > T once so that both parts have u <= T and a
// positive span. Split rule: u1 = min(u-1, T), u2 = u - u1,
// l2 = max(0, l - u1 + 1), l1 = l - l2.
inline PespInstance binarize(const PespInstance& inst) {
    PespInstance out = inst;
    const int64_t T = inst.period;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Arc& a : out.arcs) {
            if (a.upper <= T) continue;
            int64_t u1 = std::min(a.upper - 1, T);
            int64_t u2 = a.upper - u1;
            int64_t l2 = std::max<int64_t>(0, a.lower - (u1 - 1));
            int64_t l1 = a.lower - l2;
            out = subdivide(out, a.id, l1, u1, l2, u2);
            changed = true;
            break;
        }
    }
    return out;
}

namespace detail {

// True iff removing arc_id disconnects the instance.
inline bool is_bridge(const PespInstance& inst, int arc_id) {
    PespInstance tmp = inst;
    tmp.arcs.erase(std::remove_if(tmp.arcs.begin(), tmp.arcs.end(),
                                  [&](const Arc& a) { return a.id == arc_id; }),
                   tmp.arcs.end());
    return !is_weakly_connected(tmp);
}

}  // namespace detail

// Shrinks the cyclomatic number by repeatedly deleting a non-bridge arc of
// maximal span, breaking ties by lowest weight, then lowest arc id.
inline PespInstance restrict_to_mu(const PespInstance& inst, int64_t target_mu) {
    if (target_mu < 0) throw InstanceError("target mu must be nonnegative");
    if (target_mu > inst.mu()) throw InstanceError("target mu exceeds current cyclomatic number");
    PespInstance out = inst;
    while (out.mu() > target_mu) {
        std::vector<const Arc*> order;
        for (const Arc& a : out.arcs) order.push_back(&a);
        std::sort(order.begin(), order.end(), [](const Arc* a, const Arc* b) {
            int64_t sa = a->upper - a->lower, sb = b->upper - b->lower;
            if (sa != sb) return sa > sb;
            if (a->weight != b->weight) return a->weight < b->weight;
            return a->id < b->id;
        });
        bool removed = false;
        for (const Arc* a : order) {
            if (detail::is_bridge(out, a->id)) continue;
            int id = a->id;
            out.arcs.erase(std::remove_if(out.arcs.begin(), out.arcs.end(),
                                          [&](const Arc& b) { return b.id == id; }),
                           out.arcs.end());
            removed = true;
            break;
        }
        if (!removed) throw InstanceError("no removable arc found");  // cannot happen while mu > 0
    }
    return out;
}

// Returns (w^T x + offset, w^T (x - l)).
inline std::pair<Rat, Rat> evaluate_objective(const PespInstance& inst, const Tension& x) {
    Rat wx = inst.objective_offset, slack = 0;
    for (const Arc& a : inst.arcs) {
        auto it = x.find(a.id);
        if (it == x.end()) throw InstanceError("tension missing arc " + std::to_string(a.id));
        const Rat& v = it->second;
        if (v < a.lower || v > a.upper)
            throw InstanceError("tension out of bounds on arc " + std::to_string(a.id));
        wx += a.weight * v;
        slack += a.weight * (v - a.lower);
    }
    return {wx, slack};
}

// Recovers a timetable from a periodic tension by spanning-tree traversal;
// non-tree arcs are verified modulo T.
inline Timetable recover_timetable(const PespInstance& inst, const Tension& x,
                                   std::optional<int> root = std::nullopt) {
    const int64_t T = inst.period;
    Timetable pi;
    if (inst.nodes.empty()) return pi;
    int r = root.value_or(inst.nodes.front());
    pi[r] = 0;
    std::queue<int> q;
    q.push(r);
    std::set<int> done{r};
    std::set<int> tree_arcs;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const Arc& a : inst.arcs) {
            int other = -1;
            Rat delta;
            if (a.tail == v && !done.count(a.head)) {
                other = a.head;
                delta = x.at(a.id);
            } else if (a.head == v && !done.count(a.tail)) {
                other = a.tail;
                delta = -x.at(a.id);
            } else {
                continue;
            }
            pi[other] = mod_period(pi[v] + delta, T);
            done.insert(other);
            tree_arcs.insert(a.id);
            q.push(other);
        }
    }
    const Rat tol(1, 1000000);
    for (const Arc& a : inst.arcs) {
        if (tree_arcs.count(a.id)) continue;
        Rat diff = mod_period(pi.at(a.head) - pi.at(a.tail) - x.at(a.id), T);
        if (diff > tol && T - diff > tol)
            throw InstanceError("not a periodic tension: arc " + std::to_string(a.id) +
                                " is inconsistent with the recovered timetable");
    }
    return pi;
}

}  // namespace pesp

#endif
