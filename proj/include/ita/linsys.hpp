#ifndef ITA_LINSYS_HPP
#define ITA_LINSYS_HPP

#include "ita/expressions.hpp"
#include "ita/linexpr.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ita {

/// Mixed strict/non-strict rational linear-constraint system. Variables are
/// 1-based ids into a name table; constraints reuse LinExpr keyed by variable id.
struct LinConstraintSystem {
    std::vector<std::string> var_names;  // index 0 unused
    struct Constraint {
        LinExpr expr;  // expr ⋈ 0
        Comparator op = Comparator::LE;
    };
    std::vector<Constraint> constraints;

    LinConstraintSystem() { var_names.emplace_back(); }

    int add_variable(const std::string& name) {
        var_names.push_back(name);
        return static_cast<int>(var_names.size()) - 1;
    }
    int variables() const { return static_cast<int>(var_names.size()) - 1; }

    void add(LinExpr expr, Comparator op) {
        for (const auto& [v, coeff] : expr.terms())
            if (v < 1 || v > variables()) throw std::invalid_argument("constraint uses undeclared variable");
        constraints.push_back({std::move(expr), op});
    }

    std::string str() const {
        std::string out;
        for (const auto& c : constraints) {
            std::string e = c.expr.str();
            for (int v = variables(); v >= 1; --v) {
                std::string from = "x" + std::to_string(v);
                std::string to = var_names[static_cast<std::size_t>(v)];
                std::size_t pos = 0;
                while ((pos = e.find(from, pos)) != std::string::npos) {
                    e.replace(pos, from.size(), to);
                    pos += to.size();
                }
            }
            out += e + " " + comparator_str(c.op) + " 0\n";
        }
        return out;
    }
};

struct Feasibility {
    bool feasible = false;
    std::map<int, Rational> witness;  // variable id -> value

    Rational value(int var) const {
        auto it = witness.find(var);
        return it == witness.end() ? Rational(0) : it->second;
    }
};

struct FeasibilityOptions {
    std::size_t max_rows = 200000;
};

namespace detail {

enum class RowKind { LE, LT, EQ };

struct Row {
    LinExpr e;
    RowKind kind;
};

/// Derived bounds are strict iff any contributing bound is strict.
inline RowKind combine(RowKind a, RowKind b) {
    return (a == RowKind::LT || b == RowKind::LT) ? RowKind::LT : RowKind::LE;
}

inline bool constant_row_holds(const Row& r) {
    int s = r.e.constant().sign();
    switch (r.kind) {
        case RowKind::LE: return s <= 0;
        case RowKind::LT: return s < 0;
        case RowKind::EQ: return s == 0;
    }
    return false;
}

}  // namespace detail

/// Exact feasibility by Fourier-Motzkin elimination with strictness tracking.
/// Equalities are removed first by substitution; on success, back-substitution
/// produces an exact rational point satisfying every constraint.
inline Feasibility feasible(const LinConstraintSystem& sys, const FeasibilityOptions& opts = {}) {
    using detail::Row;
    using detail::RowKind;

    std::vector<Row> rows;
    rows.reserve(sys.constraints.size());
    for (const auto& c : sys.constraints) {
        switch (c.op) {
            case Comparator::LE: rows.push_back({c.expr, RowKind::LE}); break;
            case Comparator::LT: rows.push_back({c.expr, RowKind::LT}); break;
            case Comparator::EQ: rows.push_back({c.expr, RowKind::EQ}); break;
            case Comparator::GE: rows.push_back({-c.expr, RowKind::LE}); break;
            case Comparator::GT: rows.push_back({-c.expr, RowKind::LT}); break;
        }
    }

    // Substitution frames, applied in reverse to build the witness.
    struct EqFrame {
        int var;
        LinExpr value;  // var := value (over still-free variables)
    };
    struct ElimFrame {
        int var;
        std::vector<std::pair<LinExpr, bool>> lowers;  // var >= expr (strict?)
        std::vector<std::pair<LinExpr, bool>> uppers;  // var <= expr (strict?)
    };
    std::vector<EqFrame> eqs;
    std::vector<ElimFrame> elims;

    auto substitute_var = [](std::vector<Row>& rs, int var, const LinExpr& value) {
        for (Row& r : rs) {
            Rational a = r.e.coeff(var);
            if (a.is_zero()) continue;
            r.e.add_term(var, -a);
            r.e += value * a;
        }
    };

    // Phase 1: eliminate equalities.
    while (true) {
        auto it = std::find_if(rows.begin(), rows.end(),
                               [](const Row& r) { return r.kind == RowKind::EQ && !r.e.is_constant(); });
        if (it == rows.end()) break;
        int var = it->e.terms().begin()->first;
        Rational a = it->e.coeff(var);
        LinExpr value = it->e;
        value.add_term(var, -a);
        value *= -a.inverse();  // var = -(rest)/a
        rows.erase(it);
        substitute_var(rows, var, value);
        eqs.push_back({var, std::move(value)});
    }
    // Constant equalities (and any constant inequalities so far).
    for (auto it = rows.begin(); it != rows.end();) {
        if (it->e.is_constant()) {
            if (!detail::constant_row_holds(*it)) return {};
            it = rows.erase(it);
        } else {
            ++it;
        }
    }

    // Phase 2: Fourier-Motzkin on the remaining inequalities.
    while (true) {
        std::map<int, std::pair<std::size_t, std::size_t>> counts;  // var -> (#lower, #upper)
        for (const Row& r : rows) {
            for (const auto& [v, a] : r.e.terms()) {
                if (a.sign() > 0)
                    ++counts[v].second;
                else
                    ++counts[v].first;
            }
        }
        if (counts.empty()) break;
        int var = -1;
        std::size_t best = 0;
        for (const auto& [v, lu] : counts) {
            std::size_t cost = lu.first * lu.second;
            if (var < 0 || cost < best) {
                var = v;
                best = cost;
            }
        }

        ElimFrame frame;
        frame.var = var;
        std::vector<Row> keep;
        std::vector<std::pair<LinExpr, bool>>& lowers = frame.lowers;
        std::vector<std::pair<LinExpr, bool>>& uppers = frame.uppers;
        for (Row& r : rows) {
            Rational a = r.e.coeff(var);
            if (a.is_zero()) {
                keep.push_back(std::move(r));
                continue;
            }
            LinExpr bound = r.e;
            bound.add_term(var, -a);
            bound *= -a.inverse();  // var ⋈ bound
            bool strict = r.kind == RowKind::LT;
            if (a.sign() > 0) {
                uppers.emplace_back(std::move(bound), strict);
            } else {
                lowers.emplace_back(std::move(bound), strict);
            }
        }
        for (const auto& [lo, lo_strict] : lowers) {
            for (const auto& [hi, hi_strict] : uppers) {
                Row r{lo - hi, (lo_strict || hi_strict) ? RowKind::LT : RowKind::LE};
                if (r.e.is_constant()) {
                    if (!detail::constant_row_holds(r)) return {};
                } else {
                    keep.push_back(std::move(r));
                }
                if (keep.size() > opts.max_rows) throw cap_error("Fourier-Motzkin row cap exceeded");
            }
        }
        rows = std::move(keep);
        elims.push_back(std::move(frame));
    }

    for (const Row& r : rows)
        if (!detail::constant_row_holds(r)) return {};

    // Back-substitution: pick values for eliminated variables innermost-first.
    Feasibility out;
    out.feasible = true;
    auto eval = [&](const LinExpr& e) {
        Rational v = e.constant();
        for (const auto& [var, a] : e.terms()) v += a * out.value(var);
        return v;
    };
    for (auto it = elims.rbegin(); it != elims.rend(); ++it) {
        std::optional<Rational> lo, hi;
        bool lo_strict = false, hi_strict = false;
        for (const auto& [e, strict] : it->lowers) {
            Rational v = eval(e);
            if (!lo || v > *lo || (v == *lo && strict)) {
                lo = v;
                lo_strict = strict;
            }
        }
        for (const auto& [e, strict] : it->uppers) {
            Rational v = eval(e);
            if (!hi || v < *hi || (v == *hi && strict)) {
                hi = v;
                hi_strict = strict;
            }
        }
        Rational value;
        if (lo && hi) {
            value = (*lo == *hi) ? *lo : (*lo + *hi) / Rational(2);
        } else if (lo) {
            value = lo_strict ? *lo + Rational(1) : *lo;
        } else if (hi) {
            value = hi_strict ? *hi - Rational(1) : *hi;
        }
        out.witness[it->var] = value;
    }
    for (auto it = eqs.rbegin(); it != eqs.rend(); ++it) out.witness[it->var] = eval(it->value);
    return out;
}

}  // namespace ita

#endif  // ITA_LINSYS_HPP
