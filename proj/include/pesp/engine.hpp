#ifndef pesp_engine_hpp
#define pesp_engine_hpp

#include "pesp/cuts.hpp"
#include "pesp/cycles.hpp"
#include "pesp/instance.hpp"
#include "pesp/lp.hpp"
#include "pesp/separation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pesp {

enum class AlphaOrder { Descending, Ascending };

struct EngineConfig {
    double time_limit = 3600.0;          // seconds
    int max_cuts_per_round = 50;         // heuristic-phase cap
    AlphaOrder alpha_order = AlphaOrder::Descending;
    size_t pool_max = 100000;
    double violation_tolerance = 1e-6;
    double parallel_cosine = 0.999;      // near-parallel rejection threshold
    int age_out_solves = 20;             // inactive rounds before removal
    int threads = 1;                     // workers for the exact alpha sweep
    bool heuristic_only = false;         // skip the exact phase entirely
};

enum class EngineStatus { SplitClosureOptimal, TimeLimit, IntegralLp };

inline std::string to_string(EngineStatus s) {
    switch (s) {
        case EngineStatus::SplitClosureOptimal: return "SplitClosureOptimal";
        case EngineStatus::TimeLimit: return "TimeLimit";
        case EngineStatus::IntegralLp: return "IntegralLp";
    }
    return "?";
}

struct LogEntry {
    double wall_time_s = 0;
    int iteration = 0;
    std::string phase;            // "heuristic" or "exact"
    std::optional<int> alpha;     // empty for heuristic
    int cuts_added = 0;
    size_t pool_size = 0;
    double lp_bound_wx = 0;
    double lp_bound_slack = 0;
};

struct Report {
    EngineStatus status = EngineStatus::SplitClosureOptimal;
    double bound_wx = 0;
    double bound_slack = 0;
    int cuts_total = 0;
    int cuts_exact = 0;
    double runtime_s = 0;
    std::vector<LogEntry> log;
    std::vector<FlipCut> pool;    // active cuts at termination
    Tension point;                // terminal LP point (clamped into the box)
};

namespace detail {

struct PoolEntry {
    FlipCut cut;
    std::string key;
    bool exact = false;  // exact-phase cuts are never filtered or aged out
    int inactive = 0;
};

inline double cut_cosine(const FlipCut& a, const FlipCut& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [id, c] : a.coefficients) {
        double ca = to_double(c);
        na += ca * ca;
        auto it = b.coefficients.find(id);
        if (it != b.coefficients.end()) dot += ca * to_double(it->second);
    }
    for (const auto& [id, c] : b.coefficients) {
        double cb = to_double(c);
        nb += cb * cb;
    }
    if (na == 0 || nb == 0) return 0;
    return dot / std::sqrt(na * nb);
}

}  // namespace detail

// Heuristic-phase pool filtering: dedup by canonical provenance, reject
// near-parallel candidates within the round, cap by violation. Exact-phase
// cuts bypass this entirely.
inline std::vector<FlipCut> pool_filter(const PespInstance& inst,
                                        const std::vector<detail::PoolEntry>& pool,
                                        const std::vector<FlipCut>& candidates, const Tension& x,
                                        const EngineConfig& config) {
    std::set<std::string> keys;
    for (const auto& entry : pool) keys.insert(entry.key);
    std::vector<FlipCut> order = candidates;
    std::stable_sort(order.begin(), order.end(), [&](const FlipCut& a, const FlipCut& b) {
        return violation(a, x) > violation(b, x);
    });
    std::vector<FlipCut> accepted;
    for (FlipCut& cand : order) {
        if (static_cast<int>(accepted.size()) >= config.max_cuts_per_round) break;
        if (!keys.insert(cut_key(inst, cand.gamma, cand.F)).second) continue;
        bool parallel = false;
        for (const FlipCut& acc : accepted)
            if (detail::cut_cosine(cand, acc) > config.parallel_cosine) {
                parallel = true;
                break;
            }
        if (!parallel) accepted.push_back(std::move(cand));
    }
    return accepted;
}

// Biconnected components of the underlying undirected graph; every bridge
// becomes its own (mu = 0) block. Bounds are additive over blocks.
inline std::vector<PespInstance> decompose_by_blocks(const PespInstance& inst) {
    // iterative DFS lowpoint algorithm with an arc stack
    std::map<int, std::vector<std::pair<int, int>>> adj;  // node -> (other, arc id)
    for (const Arc& a : inst.arcs) {
        adj[a.tail].push_back({a.head, a.id});
        adj[a.head].push_back({a.tail, a.id});
    }
    std::map<int, int> num, low;
    std::vector<int> arc_stack;
    std::vector<std::vector<int>> blocks;
    int counter = 0;
    struct Frame {
        int v, parent_arc;
        size_t next = 0;
    };
    for (int root : inst.nodes) {
        if (num.count(root)) continue;
        std::vector<Frame> stack{{root, -1}};
        num[root] = low[root] = counter++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < adj[f.v].size()) {
                auto [w, id] = adj[f.v][f.next++];
                if (id == f.parent_arc) continue;
                if (!num.count(w)) {
                    arc_stack.push_back(id);
                    num[w] = low[w] = counter++;
                    stack.push_back({w, id});
                } else if (num[w] < num[f.v]) {
                    arc_stack.push_back(id);
                    low[f.v] = std::min(low[f.v], num[w]);
                }
            } else {
                int v = f.v, parent_arc = f.parent_arc;
                stack.pop_back();
                if (stack.empty()) continue;
                int p = stack.back().v;
                low[p] = std::min(low[p], low[v]);
                if (low[v] >= num[p]) {
                    // p is an articulation point (or root): pop one block
                    std::vector<int> block;
                    while (!arc_stack.empty()) {
                        int id = arc_stack.back();
                        block.push_back(id);
                        arc_stack.pop_back();
                        if (id == parent_arc) break;
                    }
                    if (!block.empty()) blocks.push_back(std::move(block));
                }
            }
        }
    }
    std::vector<PespInstance> parts;
    for (auto& block : blocks) {
        std::sort(block.begin(), block.end());
        PespInstance sub;
        sub.period = inst.period;
        std::set<int> nodes;
        for (int id : block) {
            const Arc& a = inst.arc(id);
            sub.arcs.push_back(a);
            nodes.insert(a.tail);
            nodes.insert(a.head);
        }
        sub.nodes.assign(nodes.begin(), nodes.end());
        parts.push_back(std::move(sub));
    }
    std::sort(parts.begin(), parts.end(), [](const PespInstance& a, const PespInstance& b) {
        return a.arcs.front().id < b.arcs.front().id;
    });
    return parts;
}

namespace detail {

// z = Gamma x / T integrality on a fixed fundamental basis.
inline bool z_integral(const PespInstance& inst, const CycleBasis& basis, const Tension& x,
                       double tolerance) {
    for (const OrientedCycle& g : basis.cycles) {
        double v = to_double(cycle_value<Rat>(g, x)) / static_cast<double>(inst.period);
        if (std::fabs(v - std::round(v)) > tolerance) return false;
    }
    return true;
}

}  // namespace detail

// The cutting-plane loop: LP solve, z-integrality check, MST heuristic,
// exact per-alpha sweep with the decrease-and-wrap schedule. Exact-phase cuts
// are always enforced.
inline Report run(const PespInstance& inst, const EngineConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Report report;
    Rat wl = inst.objective_offset;
    for (const Arc& a : inst.arcs) wl += a.weight * a.lower;
    const double base = to_double(wl);  // w^T l + offset: the trivial bound

    std::map<int, Rat> zero_key;
    for (const Arc& a : inst.arcs) zero_key[a.id] = 0;
    CycleBasis z_basis = fundamental_basis(inst, min_spanning_tree(inst, zero_key));
    const int num_alphas = static_cast<int>(inst.period / 2);

    std::vector<detail::PoolEntry> pool;
    LpModel<double> model = build_model(inst, {});
    LpSolution<double> sol = solve(model);
    if (sol.status != LpStatus::Optimal) throw LpError("root LP infeasible");

    auto rebuild = [&]() {
        std::vector<FlipCut> cuts;
        for (const auto& e : pool) cuts.push_back(e.cut);
        model = build_model(inst, cuts);
        sol = solve(model);
        if (sol.status != LpStatus::Optimal)
            throw LpError("cut LP infeasible\n" + dump_model(model));
    };
    auto add_cuts = [&](const std::vector<FlipCut>& cuts, bool exact) {
        std::set<std::string> keys;
        for (const auto& e : pool) keys.insert(e.key);
        std::vector<LpRow<double>> rows;
        std::map<int, int> index;
        for (size_t j = 0; j < model.var_ids.size(); ++j) index[model.var_ids[j]] = (int)j;
        int added = 0;
        for (const FlipCut& cut : cuts) {
            std::string key = cut_key(inst, cut.gamma, cut.F);
            if (!keys.insert(key).second) continue;
            pool.push_back({cut, key, exact, 0});
            LpRow<double> row;
            for (const auto& [id, c] : cut.coefficients) row.coeffs[index.at(id)] = to_double(c);
            row.rhs = to_double(cut.rhs);
            row.tag = key;
            rows.push_back(std::move(row));
            ++added;
            if (exact) ++report.cuts_exact;
        }
        if (added > 0) {
            sol = add_rows_and_resolve(model, sol, rows);
            if (sol.status != LpStatus::Optimal)
                throw LpError("cut LP infeasible\n" + dump_model(model));
        }
        report.cuts_total += added;
        return added;
    };
    auto age_out = [&]() {
        bool removed = false;
        for (size_t i = 0; i < pool.size(); ++i) {
            double dual = i < sol.duals.size() ? sol.duals[i] : 0.0;
            if (std::fabs(dual) < 1e-9)
                pool[i].inactive += 1;
            else
                pool[i].inactive = 0;
        }
        std::erase_if(pool, [&](const detail::PoolEntry& e) {
            bool drop = !e.exact && e.inactive >= config.age_out_solves;
            removed = removed || drop;
            return drop;
        });
        while (pool.size() > config.pool_max) {
            auto victim = std::max_element(pool.begin(), pool.end(),
                                           [](const auto& a, const auto& b) {
                                               if (a.exact != b.exact) return a.exact;
                                               return a.inactive < b.inactive;
                                           });
            if (victim == pool.end() || victim->exact) break;
            pool.erase(victim);
            removed = true;
        }
        if (removed) rebuild();
    };
    auto log_round = [&](const std::string& phase, std::optional<int> a, int added) {
        LogEntry e;
        e.wall_time_s = elapsed();
        e.iteration = static_cast<int>(report.log.size());
        e.phase = phase;
        e.alpha = a;
        e.cuts_added = added;
        e.pool_size = pool.size();
        e.lp_bound_wx = sol.objective;
        e.lp_bound_slack = sol.objective - base;
        report.log.push_back(e);
    };

    int alpha_cur = config.alpha_order == AlphaOrder::Descending ? num_alphas : 1;
    auto advance_alpha = [&] {
        if (config.alpha_order == AlphaOrder::Descending)
            alpha_cur = alpha_cur > 1 ? alpha_cur - 1 : num_alphas;
        else
            alpha_cur = alpha_cur < num_alphas ? alpha_cur + 1 : 1;
    };

    log_round("heuristic", std::nullopt, 0);
    while (true) {
        if (elapsed() > config.time_limit) {
            report.status = EngineStatus::TimeLimit;
            break;
        }
        Tension x = tension_from_solution(inst, model, sol);
        if (detail::z_integral(inst, z_basis, x, config.violation_tolerance)) {
            report.status = EngineStatus::IntegralLp;
            break;
        }
        int added = add_cuts(pool_filter(inst, pool, heuristic_separate(inst, x), x, config),
                             /*exact=*/false);
        if (added > 0) {
            log_round("heuristic", std::nullopt, added);
            age_out();
            continue;
        }
        if (config.heuristic_only) {
            // no exact certificate: report as a budget stop, not optimality
            report.status = EngineStatus::TimeLimit;
            break;
        }
        // exact phase: sweep alphas until a cut appears or a full cycle fails
        bool found = false;
        int streak = 0;
        while (streak < num_alphas && elapsed() <= config.time_limit) {
            int window = std::max(1, std::min(config.threads, num_alphas - streak));
            std::vector<int> batch;
            for (int k = 0; k < window; ++k) {
                batch.push_back(alpha_cur);
                advance_alpha();
            }
            std::vector<std::future<std::pair<std::optional<Rat>, std::vector<FlipCut>>>> jobs;
            for (int a : batch)
                jobs.push_back(std::async(window > 1 ? std::launch::async : std::launch::deferred,
                                          [&, a] { return exact_separate_alpha(inst, x, a); }));
            for (size_t k = 0; k < batch.size() && !found; ++k) {
                auto [cost, cuts] = jobs[k].get();
                (void)cost;
                if (!cuts.empty() && add_cuts(cuts, /*exact=*/true) > 0) {
                    found = true;
                    log_round("exact", batch[k], static_cast<int>(cuts.size()));
                } else {
                    ++streak;
                }
            }
            if (found) break;
        }
        if (elapsed() > config.time_limit) {
            report.status = EngineStatus::TimeLimit;
            break;
        }
        if (!found) {
            report.status = EngineStatus::SplitClosureOptimal;
            break;
        }
        age_out();
    }

    report.bound_wx = sol.objective;
    report.bound_slack = sol.objective - base;
    report.runtime_s = elapsed();
    report.point = tension_from_solution(inst, model, sol);
    for (const auto& e : pool) report.pool.push_back(e.cut);
    return report;
}

// Solves each biconnected block independently and sums the bounds (valid by
// the product/block decomposition of the split closure).
inline Report run_by_blocks(const PespInstance& inst, const EngineConfig& config) {
    Report total;
    total.status = EngineStatus::SplitClosureOptimal;
    total.bound_wx = to_double(inst.objective_offset);
    for (const PespInstance& block : decompose_by_blocks(inst)) {
        Report r = run(block, config);
        total.bound_wx += r.bound_wx;
        total.bound_slack += r.bound_slack;
        total.cuts_total += r.cuts_total;
        total.cuts_exact += r.cuts_exact;
        total.runtime_s += r.runtime_s;
        for (auto& e : r.log) total.log.push_back(e);
        for (auto& c : r.pool) total.pool.push_back(c);
        for (auto& [id, v] : r.point) total.point[id] = v;
        if (r.status == EngineStatus::TimeLimit) total.status = EngineStatus::TimeLimit;
        if (r.status == EngineStatus::IntegralLp &&
            total.status == EngineStatus::SplitClosureOptimal)
            total.status = EngineStatus::SplitClosureOptimal;  // blocks certified individually
    }
    return total;
}

}  // namespace pesp

#endif
