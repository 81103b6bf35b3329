#ifndef ITA_ITAMINUS_HPP
#define ITA_ITAMINUS_HPP

#include "ita/expressions.hpp"
#include "ita/semantics.hpp"

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ita {

/// F_{i,j} for every pair of levels i >= j: the expressions that may have to be
/// memorized for clock x_j while the automaton runs at level i.
class FSets {
public:
    explicit FSets(int n) : n_(n), sets_(static_cast<std::size_t>(n * n)) {}

    int levels() const { return n_; }

    const std::vector<LinExpr>& at(int i, int j) const {
        return sets_.at(idx(i, j));
    }

    /// Aggregate F_j = union over i of F_{i,j}; by monotonicity this is F_{n,j}.
    const std::vector<LinExpr>& aggregate(int j) const { return at(n_, j); }

    bool add(int i, int j, const LinExpr& e, std::size_t cap) {
        auto& set = sets_.at(idx(i, j));
        if (std::find(set.begin(), set.end(), e) != set.end()) return false;
        if (set.size() >= cap) throw cap_error("F-set cap exceeded at F_{" + std::to_string(i) + "," +
                                               std::to_string(j) + "}");
        set.push_back(e);
        return true;
    }

private:
    std::size_t idx(int i, int j) const {
        if (i < 1 || i > n_ || j < 1 || j > i)
            throw std::out_of_range("F_{i,j} needs 1 <= j <= i <= n");
        return static_cast<std::size_t>((i - 1) * n_ + (j - 1));
    }

    int n_;
    std::vector<std::vector<LinExpr>> sets_;
};

struct ItaMinusOptions {
    std::size_t max_exprs_per_set = 4096;
    std::size_t max_states = 20000;
};

/// Inductive construction: F_{i,i} = {x_i}; F_{i,j} extends F_{i-1,j} with every
/// update expression of x_j on a level-i edge, under all substitutions of lower
/// clocks by their possible memorized expressions.
inline FSets build_F_sets(const ITAModel& m, const ItaMinusOptions& opts = {}) {
    int n = m.clock_count;
    FSets fs(n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= i; ++j) {
            if (i == j) {
                fs.add(i, j, LinExpr::clock(j), opts.max_exprs_per_set);
                continue;
            }
            for (const LinExpr& e : fs.at(i - 1, j)) fs.add(i, j, e, opts.max_exprs_per_set);
            for (const auto& tr : m.transitions) {
                if (m.level_of(tr.source) != i) continue;
                const LinExpr* upd = tr.update.expr_for(j);
                if (upd == nullptr) continue;
                // substitute each mentioned lower clock by every member of F_{i,k}
                std::vector<int> mentioned;
                for (const auto& [clock, coeff] : upd->terms())
                    if (clock < j) mentioned.push_back(clock);
                std::vector<std::size_t> pick(mentioned.size(), 0);
                while (true) {
                    Update subst;
                    for (std::size_t p = 0; p < mentioned.size(); ++p)
                        subst.set(mentioned[p], fs.at(i, mentioned[p])[pick[p]]);
                    fs.add(i, j, substitute(*upd, subst), opts.max_exprs_per_set);
                    std::size_t carry = 0;
                    while (carry < pick.size()) {
                        if (++pick[carry] < fs.at(i, mentioned[carry]).size()) break;
                        pick[carry] = 0;
                        ++carry;
                    }
                    if (carry == pick.size()) break;
                }
            }
        }
    }
    return fs;
}

/// Result of the ITA -> ITA⁻ expansion, with enough bookkeeping to map runs and
/// witnesses between the two automata.
struct ItaMinusResult {
    ITAModel model;
    std::vector<int> base_state;          // expanded state -> original state
    std::vector<bool> minus_polarity;     // expanded state -> q⁻ copy?
    std::vector<int> origin_transition;   // expanded transition -> original id, -1 for ε-restoration
};

namespace detail {

struct ExpandedKey {
    int base = -1;
    bool minus = false;
    std::vector<LinExpr> memo;  // e_1..e_{level-1}, plus e_level for minus states

    friend bool operator<(const ExpandedKey& a, const ExpandedKey& b) {
        if (a.base != b.base) return a.base < b.base;
        if (a.minus != b.minus) return a.minus < b.minus;
        return a.memo < b.memo;
    }
};

inline std::string expanded_name(const ITAModel& m, const ExpandedKey& k) {
    std::string name = m.state_name(k.base) + (k.minus ? "-" : "+");
    if (!k.memo.empty()) {
        name += "{";
        for (std::size_t i = 0; i < k.memo.size(); ++i) {
            if (i) name += ";";
            name += k.memo[i].str();
        }
        name += "}";
    }
    return name;
}

inline Update memo_substitution(const std::vector<LinExpr>& memo) {
    Update u;
    for (std::size_t j = 0; j < memo.size(); ++j) u.set(static_cast<int>(j) + 1, memo[j]);
    return u;
}

}  // namespace detail

/// Builds the language-equivalent ITA⁻ by memorizing delayed updates of frozen
/// clocks in the states, materializing only reachable (state, expressions)
/// combinations. Decreasing transitions route through an urgent q⁻ state whose
/// single ε-transition restores the target level's clock; when that restoration
/// would be the identity the q⁻ state is skipped.
inline ItaMinusResult to_ita_minus(const ITAModel& m, const ItaMinusOptions& opts = {}) {
    using detail::ExpandedKey;
    ItaMinusResult res;
    res.model.name = m.name + "_minus";
    res.model.clock_count = m.clock_count;

    std::map<ExpandedKey, int> ids;
    std::deque<int> work;
    std::vector<ExpandedKey> keys;

    auto intern = [&](const ExpandedKey& k) {
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        if (keys.size() >= opts.max_states) throw cap_error("expanded state cap exceeded");
        int id = static_cast<int>(keys.size());
        ids.emplace(k, id);
        keys.push_back(k);
        const StateDecl& base = m.states[static_cast<std::size_t>(k.base)];
        StateDecl s;
        s.name = detail::expanded_name(m, k);
        s.level = base.level;
        s.policy = k.minus ? Policy::Urgent : base.policy;
        s.labels = base.labels;
        s.is_initial = false;
        s.is_final = !k.minus && base.is_final;
        res.model.states.push_back(std::move(s));
        res.base_state.push_back(k.base);
        res.minus_polarity.push_back(k.minus);
        work.push_back(id);
        return id;
    };

    ExpandedKey init;
    init.base = m.initial;
    for (int j = 1; j < m.level_of(m.initial); ++j) init.memo.push_back(LinExpr::clock(j));
    res.model.states.reserve(16);
    int init_id = intern(init);
    res.model.states[static_cast<std::size_t>(init_id)].is_initial = true;

    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        ExpandedKey key = keys[static_cast<std::size_t>(id)];

        if (key.minus) {
            // single urgent ε-transition restoring the memorized active clock
            int level = m.level_of(key.base);
            ExpandedKey tgt;
            tgt.base = key.base;
            tgt.memo.assign(key.memo.begin(), key.memo.end() - 1);
            TransitionDecl tr;
            tr.source = id;
            tr.action = "";
            tr.update.set(level, key.memo.back());
            tr.target = intern(tgt);
            res.model.transitions.push_back(std::move(tr));
            res.origin_transition.push_back(-1);
            continue;
        }

        Update subst = detail::memo_substitution(key.memo);
        int i = m.level_of(key.base);
        for (int tid : m.outgoing[static_cast<std::size_t>(key.base)]) {
            const TransitionDecl& t = m.transitions[static_cast<std::size_t>(tid)];
            int ip = m.level_of(t.target);
            TransitionDecl tr;
            tr.source = id;
            tr.action = t.action;
            for (const GuardAtom& atom : t.guard)
                tr.guard.push_back({substitute(atom.expr, subst), atom.op});

            auto memo_after = [&](int count) {
                std::vector<LinExpr> memo;
                for (int j = 1; j <= count; ++j) {
                    if (j < i) {
                        const LinExpr* cj = t.update.expr_for(j);
                        memo.push_back(cj ? substitute(*cj, subst)
                                          : (j <= static_cast<int>(key.memo.size())
                                                 ? key.memo[static_cast<std::size_t>(j - 1)]
                                                 : LinExpr::clock(j)));
                    } else {
                        memo.push_back(LinExpr::clock(j));
                    }
                }
                return memo;
            };

            if (i <= ip) {
                ExpandedKey tgt;
                tgt.base = t.target;
                tgt.memo = memo_after(ip - 1);
                if (const LinExpr* ci = t.update.expr_for(i)) tr.update.set(i, substitute(*ci, subst));
                for (int j = i + 1; j <= ip; ++j) tr.update.set(j, LinExpr(0));
                tr.target = intern(tgt);
            } else {
                std::vector<LinExpr> memo = memo_after(ip);
                for (int j = ip + 1; j <= m.clock_count; ++j) tr.update.set(j, LinExpr(0));
                LinExpr restored = memo.back();
                if (restored == LinExpr::clock(ip)) {
                    ExpandedKey tgt;
                    tgt.base = t.target;
                    tgt.memo.assign(memo.begin(), memo.end() - 1);
                    tr.target = intern(tgt);
                } else {
                    ExpandedKey tgt;
                    tgt.base = t.target;
                    tgt.minus = true;
                    tgt.memo = std::move(memo);
                    tr.target = intern(tgt);
                }
            }
            res.model.transitions.push_back(std::move(tr));
            res.origin_transition.push_back(tid);
        }
    }

    res.model.finalize();
    return res;
}

/// Exact state/transition counts of the reachable expansion, for budgeting.
inline std::pair<std::size_t, std::size_t> count_expanded(const ITAModel& m,
                                                          const ItaMinusOptions& opts = {}) {
    ItaMinusResult r = to_ita_minus(m, opts);
    return {r.model.states.size(), r.model.transitions.size()};
}

/// Lifts a run of the original automaton into the expanded one, inserting the
/// ε-restoration steps after level-decreasing transitions.
inline Run map_run_to_expanded(const ItaMinusResult& res, const Run& run) {
    Run out;
    int cur = res.model.initial;
    for (const RunStep& s : run) {
        if (s.kind == RunStep::Kind::Time) {
            out.push_back(s);
            continue;
        }
        int next = -1;
        for (int tid : res.model.outgoing[static_cast<std::size_t>(cur)]) {
            if (res.origin_transition[static_cast<std::size_t>(tid)] == s.transition) {
                out.push_back(RunStep::fire(tid));
                next = res.model.transitions[static_cast<std::size_t>(tid)].target;
                break;
            }
        }
        if (next < 0) throw semantics_error("run does not lift to the expanded automaton");
        if (res.minus_polarity[static_cast<std::size_t>(next)]) {
            int eps = res.model.outgoing[static_cast<std::size_t>(next)].at(0);
            out.push_back(RunStep::fire(eps));
            next = res.model.transitions[static_cast<std::size_t>(eps)].target;
        }
        cur = next;
    }
    return out;
}

/// Projects a run of the expanded automaton back onto the original: restoration
/// steps vanish, everything else maps through its originating transition.
inline Run map_run_from_expanded(const ItaMinusResult& res, const Run& run) {
    Run out;
    for (const RunStep& s : run) {
        if (s.kind == RunStep::Kind::Time) {
            out.push_back(s);
            continue;
        }
        int origin = res.origin_transition.at(static_cast<std::size_t>(s.transition));
        if (origin >= 0) out.push_back(RunStep::fire(origin));
    }
    return out;
}

}  // namespace ita

#endif  // ITA_ITAMINUS_HPP
