#ifndef ITA_MODEL_HPP
#define ITA_MODEL_HPP

#include "ita/linexpr.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ita {

enum class Policy { Lazy, Urgent, Delayed };

inline std::string policy_str(Policy p) {
    switch (p) {
        case Policy::Lazy: return "lazy";
        case Policy::Urgent: return "urgent";
        case Policy::Delayed: return "delayed";
    }
    return "?";
}

struct GuardAtom {
    LinExpr expr;  // meaning: expr ⋈ 0
    Comparator op = Comparator::LE;

    bool satisfied(const Valuation& v) const { return comparator_holds(expr.evaluate(v).sign(), op); }

    friend bool operator==(const GuardAtom& a, const GuardAtom& b) {
        return a.expr == b.expr && a.op == b.op;
    }
};

struct StateDecl {
    std::string name;
    int level = 1;
    Policy policy = Policy::Lazy;
    std::set<std::string> labels;
    bool is_initial = false;
    bool is_final = false;
};

struct TransitionDecl {
    int source = -1;
    int target = -1;
    std::vector<GuardAtom> guard;  // conjunction; empty = true
    std::string action;            // empty = epsilon
    Update update;

    bool guard_satisfied(const Valuation& v) const {
        return std::all_of(guard.begin(), guard.end(),
                           [&](const GuardAtom& g) { return g.satisfied(v); });
    }
};

/// An interrupt timed automaton: states on levels 1..n, one clock per level.
struct ITAModel {
    std::string name = "ita";
    int clock_count = 1;
    std::vector<StateDecl> states;
    std::vector<TransitionDecl> transitions;

    // derived
    std::map<std::string, int> state_index;
    std::vector<std::vector<int>> outgoing;  // per state: transition ids
    int initial = -1;

    int level_of(int state) const { return states.at(static_cast<std::size_t>(state)).level; }
    Policy policy_of(int state) const { return states.at(static_cast<std::size_t>(state)).policy; }
    const std::string& state_name(int state) const {
        return states.at(static_cast<std::size_t>(state)).name;
    }
    int find_state(const std::string& n) const {
        auto it = state_index.find(n);
        return it == state_index.end() ? -1 : it->second;
    }

    std::set<std::string> alphabet() const {
        std::set<std::string> sigma;
        for (const auto& t : transitions)
            if (!t.action.empty()) sigma.insert(t.action);
        return sigma;
    }

    /// Rebuilds indices and completes updates: clocks above the source level are
    /// provably 0 before any transition fires, so missing assignments for them are
    /// materialized as explicit resets (the shape the definition requires).
    void finalize() {
        state_index.clear();
        outgoing.assign(states.size(), {});
        initial = -1;
        for (std::size_t i = 0; i < states.size(); ++i) {
            state_index[states[i].name] = static_cast<int>(i);
            if (states[i].is_initial && initial < 0) initial = static_cast<int>(i);
        }
        for (std::size_t t = 0; t < transitions.size(); ++t) {
            auto& tr = transitions[t];
            if (tr.source >= 0 && tr.source < static_cast<int>(states.size())) {
                outgoing[static_cast<std::size_t>(tr.source)].push_back(static_cast<int>(t));
                int k = level_of(tr.source);
                for (int i = k + 1; i <= clock_count; ++i) {
                    if (tr.update.is_identity(i)) tr.update.set(i, LinExpr(0));
                }
            }
        }
    }

    std::vector<std::string> validate() const;
    std::pair<bool, std::vector<std::string>> is_ita_minus() const;
    std::string render() const;
};

namespace detail {

/// True when `e` only mentions clocks strictly below `clock` (the definition's
/// "sum over j < i" shape); constants qualify.
inline bool lower_form(const LinExpr& e, int clock) { return e.max_clock() < clock; }

}  // namespace detail

inline std::vector<std::string> ITAModel::validate() const {
    std::vector<std::string> out;
    if (clock_count < 1) out.push_back("clock count must be at least 1");
    std::set<std::string> seen;
    int initials = 0;
    for (const auto& s : states) {
        if (!seen.insert(s.name).second) out.push_back("duplicate state name '" + s.name + "'");
        if (s.level < 1 || s.level > clock_count)
            out.push_back("state '" + s.name + "' level " + std::to_string(s.level) +
                          " outside 1.." + std::to_string(clock_count));
        if (s.is_initial) ++initials;
    }
    if (initials != 1)
        out.push_back("model must have exactly one initial state, found " + std::to_string(initials));

    for (std::size_t t = 0; t < transitions.size(); ++t) {
        const auto& tr = transitions[t];
        std::string where = "transition #" + std::to_string(t);
        if (tr.source < 0 || tr.source >= static_cast<int>(states.size()) || tr.target < 0 ||
            tr.target >= static_cast<int>(states.size())) {
            out.push_back(where + ": dangling endpoint");
            continue;
        }
        int k = level_of(tr.source);
        int kp = level_of(tr.target);
        where += " (" + state_name(tr.source) + " -> " + state_name(tr.target) + ")";
        for (const auto& atom : tr.guard) {
            if (atom.expr.max_clock() > k)
                out.push_back(where + ": guard uses clock x" + std::to_string(atom.expr.max_clock()) +
                              " above level " + std::to_string(k));
        }
        // Update shape. Level-decreasing (k > k'): C_i lower-form or identity for
        // i <= k', C_i = 0 for i > k'. Otherwise: the same split at k.
        int keep = std::min(k, kp);
        for (int i = 1; i <= keep; ++i) {
            if (const LinExpr* e = tr.update.expr_for(i)) {
                if (!detail::lower_form(*e, i))
                    out.push_back(where + ": update of clock x" + std::to_string(i) +
                                  " uses clock x" + std::to_string(e->max_clock()) +
                                  " at or above " + std::to_string(i));
            }
        }
        for (int i = keep + 1; i <= clock_count; ++i) {
            const LinExpr* e = tr.update.expr_for(i);
            if (e == nullptr) {
                // finalize() fills i > k; only the genuinely nonzero band remains.
                if (i <= k)
                    out.push_back(where + ": clock x" + std::to_string(i) +
                                  " must be reset to 0 on level-decreasing transition");
            } else if (!e->is_zero()) {
                out.push_back(where + ": clock x" + std::to_string(i) +
                              " must be reset to 0, got " + e->str());
            }
        }
    }
    return out;
}

inline std::pair<bool, std::vector<std::string>> ITAModel::is_ita_minus() const {
    std::vector<std::string> out;
    for (std::size_t t = 0; t < transitions.size(); ++t) {
        const auto& tr = transitions[t];
        int k = level_of(tr.source);
        int kp = level_of(tr.target);
        std::string where = "transition #" + std::to_string(t) + " (" + state_name(tr.source) +
                            " -> " + state_name(tr.target) + ")";
        if (k > kp) {
            // Only resets of the now-irrelevant clocks.
            for (int i = 1; i <= kp; ++i) {
                if (const LinExpr* e = tr.update.expr_for(i))
                    out.push_back(where + ": update `x" + std::to_string(i) + " := " + e->str() +
                                  "` not allowed on level-decreasing transition");
            }
        } else {
            for (int i = 1; i < k; ++i) {
                if (const LinExpr* e = tr.update.expr_for(i))
                    out.push_back(where + ": update `x" + std::to_string(i) + " := " + e->str() +
                                  "` of a frozen clock");
            }
            if (const LinExpr* e = tr.update.expr_for(k)) {
                if (!detail::lower_form(*e, k))
                    out.push_back(where + ": update of x" + std::to_string(k) + " not lower-form");
            }
            for (int i = k + 1; i <= kp; ++i) {
                const LinExpr* e = tr.update.expr_for(i);
                if (e != nullptr && !e->is_zero())
                    out.push_back(where + ": newly activated clock x" + std::to_string(i) +
                                  " must be reset");
            }
            for (int i = kp + 1; i <= clock_count; ++i) {
                const LinExpr* e = tr.update.expr_for(i);
                if (e != nullptr && !e->is_zero())
                    out.push_back(where + ": clock x" + std::to_string(i) + " must be 0 or identity");
            }
        }
    }
    return {out.empty(), out};
}

namespace detail {

inline bool plain_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

inline std::string quoted_name(const std::string& s) {
    return plain_identifier(s) ? s : "\"" + s + "\"";
}

/// Renders `expr ⋈ 0` with the constant moved to the right-hand side.
inline std::string atom_str(const GuardAtom& a) {
    LinExpr lhs = a.expr;
    Rational c = lhs.constant();
    lhs.add_constant(-c);
    return lhs.str() + " " + comparator_str(a.op) + " " + (-c).str();
}

}  // namespace detail

inline std::string ITAModel::render() const {
    std::string out = "ita " + name + " { clocks " + std::to_string(clock_count) + ";\n";
    for (const auto& s : states) {
        out += "  state " + detail::quoted_name(s.name) + " level " + std::to_string(s.level) +
               " policy " + policy_str(s.policy);
        if (s.is_initial) out += " initial";
        if (s.is_final) out += " final";
        if (!s.labels.empty()) {
            out += " labels {";
            bool first = true;
            for (const auto& l : s.labels) {
                if (!first) out += ",";
                out += l;
                first = false;
            }
            out += "}";
        }
        out += ";\n";
    }
    for (const auto& t : transitions) {
        out += "  trans " + detail::quoted_name(state_name(t.source)) + " -> " +
               detail::quoted_name(state_name(t.target));
        out += " on " + (t.action.empty() ? std::string("eps") : t.action);
        if (!t.guard.empty()) {
            out += " when ";
            for (std::size_t i = 0; i < t.guard.size(); ++i) {
                if (i) out += " && ";
                out += detail::atom_str(t.guard[i]);
            }
        }
        if (!t.update.is_all_identity()) {
            out += " do ";
            bool first = true;
            for (const auto& [clock, expr] : t.update.assignments()) {
                if (!first) out += ", ";
                out += "x" + std::to_string(clock) + " := " + expr.str();
                first = false;
            }
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

/// Rewrites every guard atom at a level-k source into the form with x_k
/// coefficient in {0,1}, reversing comparators where normalization flipped.
inline ITAModel normalize_guards(const ITAModel& m) {
    ITAModel out = m;
    for (auto& tr : out.transitions) {
        int k = out.level_of(tr.source);
        for (auto& atom : tr.guard) {
            NormalizedExpr n = normalize(atom.expr, k);
            atom.expr = n.expr;
            if (n.flipped) atom.op = reverse(atom.op);
        }
    }
    out.finalize();
    return out;
}

}  // namespace ita

#endif  // ITA_MODEL_HPP
