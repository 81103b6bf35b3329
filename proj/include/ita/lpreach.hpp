#ifndef ITA_LPREACH_HPP
#define ITA_LPREACH_HPP

#include "ita/linsys.hpp"
#include "ita/semantics.hpp"

#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

namespace ita {

/// Transition sequence from the initial state; one symbolic delay precedes
/// every transition (consecutive discrete steps use a delay that may be 0).
struct PathCandidate {
    std::vector<int> transitions;
};

/// Symbolic encoding of a path: constraints over the delay variables after
/// constant propagation of updates, plus the running clock expressions.
struct PathEncoding {
    LinConstraintSystem sys;
    std::vector<int> delay_vars;  // variable id of gap j at index j-1
    std::vector<LinExpr> clocks;  // current symbolic clock values, by clock-1
    int current_state = -1;
};

namespace detail {

inline void encode_transition(const ITAModel& m, PathEncoding& enc, int tid) {
    const TransitionDecl& t = m.transitions.at(static_cast<std::size_t>(tid));
    if (t.source != enc.current_state)
        throw semantics_error("path is not well-chained at transition #" + std::to_string(tid));
    int level = m.level_of(t.source);
    int d = enc.sys.add_variable("d" + std::to_string(enc.delay_vars.size() + 1));
    enc.delay_vars.push_back(d);
    switch (m.policy_of(t.source)) {
        case Policy::Lazy:
            enc.sys.add(LinExpr::clock(d) * Rational(-1), Comparator::LE);  // d >= 0
            break;
        case Policy::Urgent:
            enc.sys.add(LinExpr::clock(d), Comparator::EQ);  // d = 0
            break;
        case Policy::Delayed:
            enc.sys.add(LinExpr::clock(d) * Rational(-1), Comparator::LT);  // d > 0
            break;
    }
    enc.clocks[static_cast<std::size_t>(level - 1)] += LinExpr::clock(d);

    Update symbolic;
    for (int c = 1; c <= m.clock_count; ++c) symbolic.set(c, enc.clocks[static_cast<std::size_t>(c - 1)]);
    for (const GuardAtom& atom : t.guard)
        enc.sys.add(substitute(atom.expr, symbolic), atom.op);

    std::vector<LinExpr> next = enc.clocks;
    for (const auto& [clock, expr] : t.update.assignments())
        next[static_cast<std::size_t>(clock - 1)] = substitute(expr, symbolic);
    enc.clocks = std::move(next);
    enc.current_state = t.target;
}

}  // namespace detail

/// Builds the run-to-constraint-system encoding for a path of the model:
/// initial clocks zero, one delay per gap (0 forced in urgent states, > 0
/// forced out of delayed states), guards instantiated on the symbolic clock
/// values, updates substituted forward.
inline PathEncoding encode_path(const ITAModel& m, const PathCandidate& path) {
    PathEncoding enc;
    enc.clocks.assign(static_cast<std::size_t>(m.clock_count), LinExpr(0));
    enc.current_state = m.initial;
    for (int tid : path.transitions) detail::encode_transition(m, enc, tid);
    return enc;
}

/// (E+n)^(3n): beyond this length every ITA⁻ path contains a removable or
/// pumpable repetition, so bounded reachability search is complete at it.
inline BigInt compute_bound(int transitions, int clocks) {
    return boost::multiprecision::pow(BigInt(transitions + clocks),
                                      static_cast<unsigned>(3 * clocks));
}

/// Exponent of the general-ITA path budget (n+2)^(12*b*E*n^3), where b is the
/// bit size of the constants. Reported symbolically; the expanded value is
/// usually astronomical.
inline long general_bound_exponent(int transitions, int clocks, int bits) {
    return 12L * bits * transitions * static_cast<long>(clocks) * clocks * clocks;
}

/// Bit size of the largest constant (numerator or denominator) in the model.
inline int constant_bits(const ITAModel& m) {
    BigInt biggest = 1;
    auto see = [&](const Rational& r) {
        BigInt n = boost::multiprecision::abs(r.numerator());
        if (n > biggest) biggest = n;
        if (r.denominator() > biggest) biggest = r.denominator();
    };
    auto see_expr = [&](const LinExpr& e) {
        see(e.constant());
        for (const auto& [c, a] : e.terms()) see(a);
    };
    for (const auto& t : m.transitions) {
        for (const auto& g : t.guard) see_expr(g.expr);
        for (const auto& [c, e] : t.update.assignments()) see_expr(e);
    }
    return static_cast<int>(boost::multiprecision::msb(biggest)) + 1;
}

struct ReachOptions {
    int depth = 64;  // effective depth is min(depth, theoretical bound)
    int jobs = 1;
    std::size_t max_paths = 50000;  // budget; exhaustion makes the result incomplete
};

struct ReachResult {
    bool hit = false;
    Run witness;
    bool complete = false;   // search exhausted every path (no depth cut)
    std::size_t explored = 0;
    BigInt bound;            // theoretical completeness bound (E+n)^(3n)
};

namespace detail {

struct ReachSearch {
    const ITAModel& m;
    const std::function<bool(const StateDecl&)>& target;
    const ReachOptions& opts;
    int depth_limit;
    std::size_t explored = 0;
    bool depth_cut = false;
    bool budget_cut = false;

    std::optional<Run> witness_from(const PathEncoding& enc, const PathCandidate& path,
                                    const Feasibility& f) const {
        Run run;
        for (std::size_t j = 0; j < path.transitions.size(); ++j) {
            run.push_back(RunStep::time(f.value(enc.delay_vars[j])));
            run.push_back(RunStep::fire(path.transitions[j]));
        }
        return run;
    }

    std::optional<Run> dfs(PathCandidate& path, const PathEncoding& enc) {
        if (explored >= opts.max_paths) {
            budget_cut = true;  // budget exhausted: the miss is not a proof
            return std::nullopt;
        }
        ++explored;
        if (target(m.states[static_cast<std::size_t>(enc.current_state)])) {
            Feasibility f = feasible(enc.sys);
            if (f.feasible) return witness_from(enc, path, f);
        }
        if (static_cast<int>(path.transitions.size()) >= depth_limit) {
            if (!m.outgoing[static_cast<std::size_t>(enc.current_state)].empty()) depth_cut = true;
            return std::nullopt;
        }
        for (int tid : m.outgoing[static_cast<std::size_t>(enc.current_state)]) {
            PathEncoding next = enc;
            detail::encode_transition(m, next, tid);
            if (!feasible(next.sys).feasible) continue;  // extensions cannot recover
            path.transitions.push_back(tid);
            if (auto w = dfs(path, next)) return w;
            path.transitions.pop_back();
        }
        return std::nullopt;
    }
};

}  // namespace detail

/// Systematic bounded DFS over transition sequences (lexicographic by id) with
/// infeasible-prefix pruning. `complete` reports whether the search space was
/// exhausted below the depth limit; a miss with complete=false is not a proof
/// of unreachability.
inline ReachResult bounded_reach(const ITAModel& m, const std::function<bool(const StateDecl&)>& target,
                                 const ReachOptions& opts = {}) {
    ReachResult res;
    res.bound = compute_bound(static_cast<int>(m.transitions.size()), m.clock_count);
    // searching up to the repetition bound decides the problem outright
    bool covers_bound = res.bound <= opts.depth;
    int depth_limit = covers_bound ? static_cast<int>(res.bound.convert_to<long>()) : opts.depth;
    detail::ReachSearch search{m, target, opts, depth_limit};
    PathCandidate path;
    PathEncoding root = encode_path(m, path);
    if (opts.jobs > 1) {
        // Parallel over first-level branches; the empty path is checked first.
        if (target(m.states[static_cast<std::size_t>(root.current_state)])) {
            res.hit = true;
            res.complete = true;
            res.explored = 1;
            return res;
        }
        std::vector<std::future<std::pair<std::optional<Run>, bool>>> futs;
        for (int tid : m.outgoing[static_cast<std::size_t>(root.current_state)]) {
            futs.push_back(std::async(std::launch::async, [&, tid] {
                detail::ReachSearch branch{m, target, opts, depth_limit};
                PathCandidate p;
                PathEncoding enc = root;
                detail::encode_transition(m, enc, tid);
                if (!feasible(enc.sys).feasible) return std::make_pair(std::optional<Run>{}, false);
                p.transitions.push_back(tid);
                auto w = branch.dfs(p, enc);
                return std::make_pair(w, branch.budget_cut || (branch.depth_cut && !covers_bound));
            }));
        }
        bool cut = false;
        std::optional<Run> found;
        for (auto& f : futs) {
            auto [w, c] = f.get();
            cut = cut || c;
            if (w && !found) found = w;
        }
        res.hit = found.has_value();
        if (found) res.witness = *found;
        res.complete = res.hit || !cut;
        return res;
    }
    auto w = search.dfs(path, root);
    res.hit = w.has_value();
    if (w) res.witness = *w;
    res.explored = search.explored;
    res.complete = res.hit || (!search.budget_cut && (!search.depth_cut || covers_bound));
    return res;
}

inline ReachResult bounded_reach(const ITAModel& m, const std::string& state_name,
                                 const ReachOptions& opts = {}) {
    return bounded_reach(m, [&](const StateDecl& s) { return s.name == state_name; }, opts);
}

}  // namespace ita

#endif  // ITA_LPREACH_HPP
