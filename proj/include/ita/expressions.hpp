#ifndef ITA_EXPRESSIONS_HPP
#define ITA_EXPRESSIONS_HPP

#include "ita/model.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ita {

class cap_error : public std::runtime_error {
public:
    explicit cap_error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ExprTag { Initial, Guard, Formula, UpdateClosure, LevelDifference };

inline std::string expr_tag_str(ExprTag t) {
    switch (t) {
        case ExprTag::Initial: return "initial";
        case ExprTag::Guard: return "guard";
        case ExprTag::Formula: return "formula";
        case ExprTag::UpdateClosure: return "update-closure";
        case ExprTag::LevelDifference: return "level-difference";
    }
    return "?";
}

struct ExpressionBuildOptions {
    std::size_t max_exprs_per_level = 4096;
};

/// Level-indexed expression families {E_k}. Every E_k contains x_k and 0,
/// mentions only clocks <= k, and keeps the x_k coefficient in {0,1}.
/// Indices are stable handles used by the class-graph preorders.
class ExpressionSets {
public:
    explicit ExpressionSets(int levels) : exprs_(levels), tags_(levels), index_(levels) {}

    int levels() const { return static_cast<int>(exprs_.size()); }

    const std::vector<LinExpr>& at(int level) const {
        return exprs_.at(static_cast<std::size_t>(level - 1));
    }
    ExprTag tag(int level, int idx) const {
        return tags_.at(static_cast<std::size_t>(level - 1)).at(static_cast<std::size_t>(idx));
    }

    int index_of(int level, const LinExpr& e) const {
        const auto& ix = index_.at(static_cast<std::size_t>(level - 1));
        auto it = ix.find(e);
        return it == ix.end() ? -1 : it->second;
    }

    /// E_k is seeded with [x_k, 0], so these are always 0 and 1.
    int clock_index(int level) const { return index_of(level, LinExpr::clock(level)); }
    int zero_index(int level) const { return index_of(level, LinExpr(0)); }

    /// Returns true when the expression was new.
    bool add(int level, const LinExpr& e, ExprTag tag, const ExpressionBuildOptions& opts) {
        auto& ix = index_.at(static_cast<std::size_t>(level - 1));
        if (ix.count(e)) return false;
        auto& es = exprs_[static_cast<std::size_t>(level - 1)];
        if (es.size() >= opts.max_exprs_per_level)
            throw cap_error("expression cap exceeded at level " + std::to_string(level));
        ix.emplace(e, static_cast<int>(es.size()));
        es.push_back(e);
        tags_[static_cast<std::size_t>(level - 1)].push_back(tag);
        return true;
    }

private:
    std::vector<std::vector<LinExpr>> exprs_;
    std::vector<std::vector<ExprTag>> tags_;
    std::vector<std::map<LinExpr, int>> index_;
};

namespace detail {

/// Complement of a normalized guard expression: for C = alpha*x_k + rest the
/// value compared against x_k (or 0) is -rest.
inline LinExpr guard_complement(const LinExpr& normalized, int level) {
    LinExpr rest = normalized;
    Rational alpha = normalized.coeff(level);
    if (!alpha.is_zero()) rest.add_term(level, -alpha);
    return -rest;
}

/// Projection to clocks <= level: clocks above are exactly 0 in any
/// configuration whose state sits at this level.
inline LinExpr project_to_level(const LinExpr& e, int level) {
    LinExpr out(e.constant());
    for (const auto& [clock, coeff] : e.terms())
        if (clock <= level) out.add_term(clock, coeff);
    return out;
}

}  // namespace detail

/// Saturation construction of {E_k}, processed top-down from level n to 1.
/// `comparisons` adds the formula-seeding rule of the TCTL_c^int extension.
inline ExpressionSets build_expression_sets_with_formula(
    const ITAModel& model, const std::vector<LinExpr>& comparisons,
    const ExpressionBuildOptions& opts = {}) {
    ITAModel m = normalize_guards(model);
    int n = m.clock_count;
    ExpressionSets es(n);
    for (int k = 1; k <= n; ++k) {
        es.add(k, LinExpr::clock(k), ExprTag::Initial, opts);
        es.add(k, LinExpr(0), ExprTag::Initial, opts);
    }

    for (int k = n; k >= 1; --k) {
        // Guard seeding: complement of every normalized guard at a level-k source.
        for (const auto& tr : m.transitions) {
            if (m.level_of(tr.source) != k) continue;
            for (const auto& atom : tr.guard)
                es.add(k, detail::guard_complement(atom.expr, k), ExprTag::Guard, opts);
        }
        // Formula seeding: complement of the comparison projected to this level.
        for (const LinExpr& c : comparisons) {
            NormalizedExpr nc = normalize(detail::project_to_level(c, k), k);
            es.add(k, detail::guard_complement(nc.expr, k), ExprTag::Formula, opts);
        }

        // Closure: iterate the two rules until E_k is stable. Rule 1 grows E_k
        // itself; rule 2 only feeds levels below k, which are processed later.
        std::size_t done = 0;
        while (done < es.at(k).size()) {
            std::size_t sz = es.at(k).size();
            for (std::size_t i = done; i < sz; ++i) {
                const LinExpr c = es.at(k)[i];
                for (const auto& tr : m.transitions) {
                    if (m.level_of(tr.source) >= k && m.level_of(tr.target) >= k)
                        es.add(k, substitute(c, tr.update), ExprTag::UpdateClosure, opts);
                }
            }
            done = sz;
        }
        for (const auto& tr : m.transitions) {
            int lq = m.level_of(tr.source);
            if (lq >= k || m.level_of(tr.target) < k) continue;
            const auto& ek = es.at(k);
            for (std::size_t i = 0; i < ek.size(); ++i) {
                for (std::size_t j = i + 1; j < ek.size(); ++j) {
                    LinExpr d = substitute(ek[i], tr.update) - substitute(ek[j], tr.update);
                    NormalizedExpr nd = normalize(d, lq);
                    es.add(lq, detail::guard_complement(nd.expr, lq), ExprTag::LevelDifference, opts);
                }
            }
        }
    }
    return es;
}

inline ExpressionSets build_expression_sets(const ITAModel& m,
                                            const ExpressionBuildOptions& opts = {}) {
    return build_expression_sets_with_formula(m, {}, opts);
}

}  // namespace ita

#endif  // ITA_EXPRESSIONS_HPP
