#ifndef pesp_cuts_hpp
#define pesp_cuts_hpp

#include "pesp/cycles.hpp"
#include "pesp/instance.hpp"
#include "pesp/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pesp {

// Residue controlling a flip inequality:
//   alpha(gamma, F) = [ -sum_{a not in F} gamma_a l_a - sum_{a in F} gamma_a u_a ]_T
inline int64_t alpha(const PespInstance& inst, const OrientedCycle& g, const ArcSubset& F) {
    int64_t s = 0;
    for (const auto& [id, c] : g.entries) {
        if (c == 0) continue;
        const Arc& a = inst.arc(id);
        s -= static_cast<int64_t>(c) * (F.count(id) ? a.upper : a.lower);
    }
    return mod_period(s, inst.period);
}

// A flip inequality in expanded tension form: coefficients . x >= rhs,
// with provenance (gamma, F, alpha).
struct FlipCut {
    std::map<int, Rat> coefficients;
    Rat rhs;
    OrientedCycle gamma;
    ArcSubset F;
    int64_t alpha_value = 0;

    Rat lhs_at(const Tension& x) const {
        Rat v = 0;
        for (const auto& [id, c] : coefficients) v += c * x.at(id);
        return v;
    }
};

// rhs - lhs(x); positive means the cut is violated at x.
inline Rat violation(const FlipCut& cut, const Tension& x) {
    return cut.rhs - cut.lhs_at(x);
}

// Canonical representative of (gamma, F) under the (gamma, F) ~ (-gamma, F)
// symmetry: orient so the lowest-id entry is positive, then prefer the
// orientation with alpha <= T/2.
inline std::pair<OrientedCycle, int64_t> canonical_cycle_for_cut(const PespInstance& inst,
                                                                 const OrientedCycle& g,
                                                                 const ArcSubset& F) {
    OrientedCycle c = canonical_orientation(g);
    int64_t a = alpha(inst, c, F);
    if (a != 0 && 2 * a > inst.period) {
        c = c.negated();
        a = inst.period - a;
    }
    return {c, a};
}

// Dedup key across the orientation symmetry.
inline std::string cut_key(const PespInstance& inst, const OrientedCycle& g, const ArcSubset& F) {
    auto [c, a] = canonical_cycle_for_cut(inst, g, F);
    std::ostringstream os;
    for (const auto& [id, s] : c.entries)
        if (s != 0) os << id << ":" << s << ";";
    os << "|";
    for (int id : F)
        if (c.coeff(id) != 0) os << id << ",";
    return os.str();
}

// Builds the flip inequality for (gamma, F). Slack form:
//   (T-a) sum_{A\F, g>0} g (x-l) + a sum_{A\F, g<0} (-g)(x-l)
//   + a sum_{F, g>0} g (u-x) + (T-a) sum_{F, g<0} (-g)(u-x)  >=  a(T-a)
// stored expanded in x with the constant folded into rhs.
inline FlipCut flip_cut(const PespInstance& inst, const OrientedCycle& g, const ArcSubset& F) {
    const int64_t T = inst.period;
    auto [cg, a] = canonical_cycle_for_cut(inst, g, F);
    if (a == 0) throw InstanceError("trivial cut: alpha is zero");
    FlipCut cut;
    cut.gamma = cg;
    cut.alpha_value = a;
    for (int id : F)
        if (cg.coeff(id) != 0) cut.F.insert(id);
    cut.rhs = Rat(a) * Rat(T - a);
    for (const auto& [id, c] : cg.entries) {
        if (c == 0) continue;
        const Arc& arc = inst.arc(id);
        bool flipped = cut.F.count(id) > 0;
        Rat coef;
        if (!flipped && c > 0) {
            coef = Rat(T - a) * c;                       // (T-a) g (x - l)
            cut.rhs += coef * arc.lower;
        } else if (!flipped && c < 0) {
            coef = Rat(a) * (-c);                        // a (-g)(x - l)
            cut.rhs += coef * arc.lower;
        } else if (flipped && c > 0) {
            coef = -Rat(a) * c;                          // a g (u - x)
            cut.rhs += coef * arc.upper;
        } else {
            coef = -Rat(T - a) * (-c);                   // (T-a)(-g)(u - x)
            cut.rhs += coef * arc.upper;
        }
        cut.coefficients[id] += coef;
    }
    std::erase_if(cut.coefficients, [](const auto& kv) { return kv.second == 0; });
    return cut;
}

// Rounding bounds on gamma^T x / T:
//   ceil((g+^T l - g-^T u)/T) <= gamma^T x / T <= floor((g+^T u - g-^T l)/T)
inline std::pair<int64_t, int64_t> cycle_bounds(const PespInstance& inst,
                                                const OrientedCycle& g) {
    Int lo = 0, hi = 0;
    for (const auto& [id, c] : g.entries) {
        if (c == 0) continue;
        const Arc& a = inst.arc(id);
        if (c > 0) {
            lo += Int(c) * a.lower;
            hi += Int(c) * a.upper;
        } else {
            lo += Int(c) * a.upper;
            hi += Int(c) * a.lower;
        }
    }
    Int T(inst.period);
    Int z_lo = -floor_div(-lo, T);  // ceil(lo / T)
    Int z_hi = floor_div(hi, T);
    return {z_lo.convert_to<int64_t>(), z_hi.convert_to<int64_t>()};
}

// The two cycle-inequality cuts for gamma as flip cuts: flipping all
// backward arcs enforces the upper rounding bound, flipping all forward arcs
// the lower one. Sides with alpha = 0 are skipped.
inline std::vector<FlipCut> chvatal_cuts(const PespInstance& inst, const OrientedCycle& g) {
    ArcSubset backward, forward;
    for (const auto& [id, c] : g.entries) {
        if (c > 0) forward.insert(id);
        if (c < 0) backward.insert(id);
    }
    std::vector<FlipCut> cuts;
    if (alpha(inst, g, backward) != 0) cuts.push_back(flip_cut(inst, g, backward));
    if (alpha(inst, g, forward) != 0) cuts.push_back(flip_cut(inst, g, forward));
    return cuts;
}

// Multiplier vector certifying a flip cut as a split inequality for the
// (Gamma x = Tz, l <= x <= u) row system.
struct SplitMultiplier {
    std::vector<Rat> lambda1;   // per basis cycle
    std::vector<Rat> lambda2;   // per basis cycle (always zero here)
    std::map<int, Rat> lambda3; // per arc, upper-bound rows
    std::map<int, Rat> lambda4; // per arc, lower-bound rows
};

// Constructs the multiplier lambda = (eta/T, 0, lambda3, lambda4) with
// eta^T Gamma = gamma (read off the co-tree identity submatrix),
// lambda3_a = -gamma_a/T on F, lambda4_a = gamma_a/T off F.
inline SplitMultiplier split_multiplier(const PespInstance& inst, const CycleBasis& basis,
                                        const OrientedCycle& g, const ArcSubset& F) {
    if (alpha(inst, g, F) == 0) throw InstanceError("trivial cut: alpha is zero");
    const Rat T(inst.period);
    SplitMultiplier m;
    // eta_k = gamma on the defining co-tree arc of cycle k
    std::vector<int> eta;
    for (int cotree : basis.cotree_arcs) eta.push_back(g.coeff(cotree));
    // verify eta^T Gamma = gamma
    OrientedCycle check = combine(basis, eta);
    if (!(check == g))
        throw InstanceError("cycle is not in the integer span of the basis");
    for (int e : eta) {
        m.lambda1.push_back(Rat(e) / T);
        m.lambda2.push_back(0);
    }
    for (const auto& [id, c] : g.entries) {
        if (c == 0) continue;
        if (F.count(id))
            m.lambda3[id] = -Rat(c) / T;
        else
            m.lambda4[id] = Rat(c) / T;
    }
    return m;
}

}  // namespace pesp

#endif
