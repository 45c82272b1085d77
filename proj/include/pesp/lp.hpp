#ifndef pesp_lp_hpp
#define pesp_lp_hpp

#include "pesp/cuts.hpp"
#include "pesp/instance.hpp"
#include "pesp/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pesp {

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static double feas_tol() { return 1e-9; }
    static double pivot_tol() { return 1e-10; }
    static double abs(double v) { return std::fabs(v); }
};

template <>
struct ScalarTraits<Rat> {
    static Rat feas_tol() { return 0; }
    static Rat pivot_tol() { return 0; }
    static Rat abs(const Rat& v) { return v < 0 ? Rat(-v) : v; }
};

// One >= row over structural variables.
template <typename T>
struct LpRow {
    std::map<int, T> coeffs;  // variable index -> coefficient
    T rhs{};
    std::string tag;
};

// min c^T x  s.t.  l <= x <= u,  rows: coeffs . x >= rhs
template <typename T>
struct LpModel {
    std::vector<T> lower, upper, objective;
    T offset{};
    std::vector<LpRow<T>> rows;
    std::vector<int> var_ids;  // external id per variable (arc ids)

    size_t num_vars() const { return lower.size(); }
};

enum class LpStatus { Optimal, Infeasible };
enum class BasisStatus : uint8_t { Basic, AtLower, AtUpper };

template <typename T>
struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    std::vector<T> x;
    T objective{};                    // includes model offset
    std::vector<T> duals;             // per row
    std::vector<BasisStatus> basis;   // per column (structural then slacks)
    std::vector<T> farkas;            // per row, set on infeasibility
    int iterations = 0;
};

class LpError : public std::runtime_error {
public:
    explicit LpError(const std::string& msg) : std::runtime_error(msg) {}
};

// Plain-text dump for numerical-failure reports.
template <typename T>
inline std::string dump_model(const LpModel<T>& model) {
    std::ostringstream os;
    os << "min";
    for (size_t j = 0; j < model.num_vars(); ++j)
        os << " + " << model.objective[j] << " x" << j;
    os << "\n";
    for (const auto& row : model.rows) {
        for (const auto& [j, c] : row.coeffs) os << " + " << c << " x" << j;
        os << " >= " << row.rhs << "  [" << row.tag << "]\n";
    }
    for (size_t j = 0; j < model.num_vars(); ++j)
        os << model.lower[j] << " <= x" << j << " <= " << model.upper[j] << "\n";
    return os.str();
}

// Bounded-variable dual simplex with dense basis inverse. Columns are the
// structural variables followed by one slack per row (row - slack = rhs,
// slack >= 0). The all-slack basis with structural variables at their
// objective-preferred bound is dual feasible, so re-optimization after
// adding cut rows continues from the previous basis.
template <typename T>
class LpSolver {
public:
    explicit LpSolver(const LpModel<T>& model) : model_(model) {
        n_ = model.num_vars();
        m_ = model.rows.size();
        cols_ = n_ + m_;
        A_.assign(m_, std::vector<T>(n_, T(0)));
        b_.resize(m_);
        for (size_t i = 0; i < m_; ++i) {
            for (const auto& [j, c] : model.rows[i].coeffs) A_[i][j] = c;
            b_[i] = model.rows[i].rhs;
        }
    }

    LpSolution<T> solve(const std::vector<BasisStatus>* warm = nullptr) {
        init_basis(warm);
        LpSolution<T> sol;
        const T feas = ScalarTraits<T>::feas_tol();
        const size_t max_iter = 10 * (m_ + cols_) + 1000;
        size_t iter = 0;
        for (;; ++iter) {
            if (iter > 4 * max_iter) {
                // refactorize once, then give up with a model dump
                if (!refactor())
                    throw LpError("singular basis during refactorization\n" + dump_model(model_));
                throw LpError("simplex iteration limit exceeded\n" + dump_model(model_));
            }
            if (iter % 64 == 63 && !refactor())
                throw LpError("singular basis during refactorization\n" + dump_model(model_));
            std::vector<T> xB = basic_values();
            // leaving: most infeasible basic variable
            int r = -1;
            T worst = feas;
            bool below = false;
            for (size_t i = 0; i < m_; ++i) {
                int j = basic_[i];
                T viol_lo = col_lower(j) - xB[i];
                if (viol_lo > worst) { worst = viol_lo; r = static_cast<int>(i); below = true; }
                if (col_has_upper(j)) {
                    T viol_hi = xB[i] - col_upper(j);
                    if (viol_hi > worst) { worst = viol_hi; r = static_cast<int>(i); below = false; }
                }
            }
            if (r < 0) return finish(xB, static_cast<int>(iter));

            // pivot row and reduced costs
            std::vector<T> rho(m_);
            for (size_t i = 0; i < m_; ++i) rho[i] = Binv_[r][i];
            std::vector<T> y = dual_values();

            int enter = -1;
            T best_ratio{};
            bool bland = iter > max_iter;
            const T piv = ScalarTraits<T>::pivot_tol();
            for (size_t j = 0; j < cols_; ++j) {
                if (status_[j] == BasisStatus::Basic) continue;
                T aj = dot_col(rho, j);
                bool eligible = below ? ((status_[j] == BasisStatus::AtLower && aj < -piv) ||
                                         (status_[j] == BasisStatus::AtUpper && aj > piv))
                                      : ((status_[j] == BasisStatus::AtLower && aj > piv) ||
                                         (status_[j] == BasisStatus::AtUpper && aj < -piv));
                if (!eligible) continue;
                T dj = col_cost(j) - dot_col(y, j);
                T ratio = ScalarTraits<T>::abs(dj) / ScalarTraits<T>::abs(aj);
                if (enter < 0 || ratio < best_ratio) {
                    enter = static_cast<int>(j);
                    best_ratio = ratio;
                    if (bland) break;  // first eligible column wins
                }
            }
            if (enter < 0) {
                // no pivot restores feasibility: primal infeasible
                sol.status = LpStatus::Infeasible;
                sol.farkas.resize(m_);
                for (size_t i = 0; i < m_; ++i) sol.farkas[i] = below ? T(0) - rho[i] : rho[i];
                sol.basis = status_;
                sol.iterations = static_cast<int>(iter);
                return sol;
            }
            pivot(static_cast<size_t>(r), static_cast<size_t>(enter), below);
        }
    }

private:
    const LpModel<T>& model_;
    size_t n_ = 0, m_ = 0, cols_ = 0;
    std::vector<std::vector<T>> A_;
    std::vector<T> b_;
    std::vector<int> basic_;
    std::vector<BasisStatus> status_;
    std::vector<std::vector<T>> Binv_;

    T col_entry(size_t i, size_t j) const {
        return j < n_ ? A_[i][j] : (j - n_ == i ? T(-1) : T(0));
    }
    T col_lower(size_t j) const { return j < n_ ? model_.lower[j] : T(0); }
    T col_upper(size_t j) const { return j < n_ ? model_.upper[j] : T(0); }
    bool col_has_upper(size_t j) const { return j < n_; }
    T col_cost(size_t j) const { return j < n_ ? model_.objective[j] : T(0); }

    T dot_col(const std::vector<T>& v, size_t j) const {
        if (j >= n_) return T(0) - v[j - n_];
        T s{};
        for (size_t i = 0; i < m_; ++i)
            if (!(A_[i][j] == T(0))) s += v[i] * A_[i][j];
        return s;
    }

    void init_basis(const std::vector<BasisStatus>* warm) {
        bool ok = false;
        if (warm && warm->size() == cols_) {
            status_ = *warm;
            basic_.clear();
            for (size_t j = 0; j < cols_; ++j)
                if (status_[j] == BasisStatus::Basic) basic_.push_back(static_cast<int>(j));
            ok = basic_.size() == m_ && refactor();
        }
        if (!ok) {
            status_.assign(cols_, BasisStatus::AtLower);
            basic_.clear();
            for (size_t j = 0; j < n_; ++j)
                if (model_.objective[j] < T(0)) status_[j] = BasisStatus::AtUpper;
            for (size_t i = 0; i < m_; ++i) {
                status_[n_ + i] = BasisStatus::Basic;
                basic_.push_back(static_cast<int>(n_ + i));
            }
            Binv_.assign(m_, std::vector<T>(m_, T(0)));
            for (size_t i = 0; i < m_; ++i) Binv_[i][i] = T(-1);  // inverse of -I
        }
    }

    // Rebuilds Binv_ from the basic column set by Gauss-Jordan elimination.
    bool refactor() {
        std::vector<std::vector<T>> B(m_, std::vector<T>(2 * m_, T(0)));
        for (size_t i = 0; i < m_; ++i) {
            for (size_t k = 0; k < m_; ++k) B[i][k] = col_entry(i, basic_[k]);
            B[i][m_ + i] = T(1);
        }
        const T piv = ScalarTraits<T>::pivot_tol();
        for (size_t c = 0; c < m_; ++c) {
            size_t best = c;
            for (size_t i = c + 1; i < m_; ++i)
                if (ScalarTraits<T>::abs(B[i][c]) > ScalarTraits<T>::abs(B[best][c])) best = i;
            if (!(ScalarTraits<T>::abs(B[best][c]) > piv)) return false;
            std::swap(B[c], B[best]);
            T p = B[c][c];
            for (size_t k = 0; k < 2 * m_; ++k) B[c][k] /= p;
            for (size_t i = 0; i < m_; ++i) {
                if (i == c || B[i][c] == T(0)) continue;
                T f = B[i][c];
                for (size_t k = 0; k < 2 * m_; ++k) B[i][k] -= f * B[c][k];
            }
        }
        Binv_.assign(m_, std::vector<T>(m_));
        for (size_t i = 0; i < m_; ++i)
            for (size_t k = 0; k < m_; ++k) Binv_[i][k] = B[i][m_ + k];
        return true;
    }

    std::vector<T> basic_values() const {
        std::vector<T> r = b_;
        for (size_t j = 0; j < cols_; ++j) {
            if (status_[j] == BasisStatus::Basic) continue;
            T v = status_[j] == BasisStatus::AtLower ? col_lower(j) : col_upper(j);
            if (v == T(0)) continue;
            if (j < n_) {
                for (size_t i = 0; i < m_; ++i)
                    if (!(A_[i][j] == T(0))) r[i] -= A_[i][j] * v;
            } else {
                r[j - n_] += v;
            }
        }
        std::vector<T> xB(m_, T(0));
        for (size_t i = 0; i < m_; ++i)
            for (size_t k = 0; k < m_; ++k)
                if (!(Binv_[i][k] == T(0))) xB[i] += Binv_[i][k] * r[k];
        return xB;
    }

    std::vector<T> dual_values() const {
        std::vector<T> y(m_, T(0));
        for (size_t k = 0; k < m_; ++k) {
            T ck = col_cost(basic_[k]);
            if (ck == T(0)) continue;
            for (size_t i = 0; i < m_; ++i) y[i] += ck * Binv_[k][i];
        }
        return y;
    }

    void pivot(size_t r, size_t enter, bool leaving_to_lower) {
        std::vector<T> u(m_, T(0));
        for (size_t i = 0; i < m_; ++i) {
            if (enter < n_) {
                for (size_t k = 0; k < m_; ++k)
                    if (!(A_[k][enter] == T(0))) u[i] += Binv_[i][k] * A_[k][enter];
            } else {
                u[i] = T(0) - Binv_[i][enter - n_];
            }
        }
        T p = u[r];
        for (size_t k = 0; k < m_; ++k) Binv_[r][k] /= p;
        for (size_t i = 0; i < m_; ++i) {
            if (i == r || u[i] == T(0)) continue;
            for (size_t k = 0; k < m_; ++k) Binv_[i][k] -= u[i] * Binv_[r][k];
        }
        status_[basic_[r]] = leaving_to_lower ? BasisStatus::AtLower : BasisStatus::AtUpper;
        status_[enter] = BasisStatus::Basic;
        basic_[r] = static_cast<int>(enter);
    }

    LpSolution<T> finish(const std::vector<T>& xB, int iter) const {
        LpSolution<T> sol;
        sol.status = LpStatus::Optimal;
        sol.x.resize(n_);
        for (size_t j = 0; j < n_; ++j)
            sol.x[j] = status_[j] == BasisStatus::AtLower   ? model_.lower[j]
                       : status_[j] == BasisStatus::AtUpper ? model_.upper[j]
                                                            : T(0);
        for (size_t i = 0; i < m_; ++i)
            if (static_cast<size_t>(basic_[i]) < n_) sol.x[basic_[i]] = xB[i];
        sol.objective = model_.offset;
        for (size_t j = 0; j < n_; ++j) sol.objective += model_.objective[j] * sol.x[j];
        sol.duals = dual_values();
        sol.basis = status_;
        sol.iterations = iter;
        return sol;
    }
};

// Model over the instance's tension variables only; the integral offsets are
// determined by the cycle constraints and never appear.
inline LpModel<double> build_model(const PespInstance& inst, const std::vector<FlipCut>& cuts) {
    LpModel<double> model;
    std::map<int, int> index;
    for (const Arc& a : inst.arcs) {
        index[a.id] = static_cast<int>(model.var_ids.size());
        model.var_ids.push_back(a.id);
        model.lower.push_back(static_cast<double>(a.lower));
        model.upper.push_back(static_cast<double>(a.upper));
        model.objective.push_back(to_double(a.weight));
    }
    model.offset = to_double(inst.objective_offset);
    for (const FlipCut& cut : cuts) {
        LpRow<double> row;
        for (const auto& [id, c] : cut.coefficients) row.coeffs[index.at(id)] = to_double(c);
        row.rhs = to_double(cut.rhs);
        row.tag = cut_key(inst, cut.gamma, cut.F);
        model.rows.push_back(std::move(row));
    }
    return model;
}

// Exact-rational variant used by the oracle.
inline LpModel<Rat> build_model_exact(const PespInstance& inst, const std::vector<FlipCut>& cuts) {
    LpModel<Rat> model;
    std::map<int, int> index;
    for (const Arc& a : inst.arcs) {
        index[a.id] = static_cast<int>(model.var_ids.size());
        model.var_ids.push_back(a.id);
        model.lower.push_back(Rat(a.lower));
        model.upper.push_back(Rat(a.upper));
        model.objective.push_back(a.weight);
    }
    model.offset = inst.objective_offset;
    for (const FlipCut& cut : cuts) {
        LpRow<Rat> row;
        for (const auto& [id, c] : cut.coefficients) row.coeffs[index.at(id)] = c;
        row.rhs = cut.rhs;
        row.tag = cut_key(inst, cut.gamma, cut.F);
        model.rows.push_back(std::move(row));
    }
    return model;
}

template <typename T>
inline LpSolution<T> solve(const LpModel<T>& model,
                           const std::vector<BasisStatus>* warm = nullptr) {
    LpSolver<T> solver(model);
    return solver.solve(warm);
}

// Appends rows and re-optimizes from the previous basis (new slacks basic,
// which keeps the basis dual feasible).
template <typename T>
inline LpSolution<T> add_rows_and_resolve(LpModel<T>& model, const LpSolution<T>& previous,
                                          const std::vector<LpRow<T>>& new_rows) {
    std::vector<BasisStatus> warm = previous.basis;
    for (const LpRow<T>& row : new_rows) {
        model.rows.push_back(row);
        warm.push_back(BasisStatus::Basic);  // slack columns come last
    }
    return solve(model, &warm);
}

// Extracts the tension (exact rationals, clamped into the box) from a solved
// double model.
inline Tension tension_from_solution(const PespInstance& inst, const LpModel<double>& model,
                                     const LpSolution<double>& sol) {
    Tension x;
    for (size_t j = 0; j < model.num_vars(); ++j) {
        const Arc& a = inst.arc(model.var_ids[j]);
        Rat v = rat_of(sol.x[j]);
        if (v < a.lower) v = a.lower;
        if (v > a.upper) v = a.upper;
        x[a.id] = v;
    }
    return x;
}

}  // namespace pesp

#endif
