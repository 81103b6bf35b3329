#ifndef ITA_TCTL_HPP
#define ITA_TCTL_HPP

#include "ita/classgraph.hpp"
#include "ita/formula.hpp"
#include "ita/itaminus.hpp"
#include "ita/lpreach.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ita {

// ---------------------------------------------------------------------------
// TCTL_c^int: extended class graph + CTL fixpoints
// ---------------------------------------------------------------------------

/// Truth of a clock comparison inside a class: project the comparison to the
/// class's level (higher clocks are 0 there), normalize, and consult the
/// preorder. Well-defined because the formula-seeded expression sets contain
/// the complement at every level.
inline bool class_satisfies_comparison(const Analysis& a, const ClassNode& n, const LinExpr& expr,
                                       Comparator op) {
    int level = a.model.level_of(n.state);
    LinExpr proj = detail::project_to_level(expr, level);
    NormalizedExpr ne = normalize(proj, level);
    Comparator eff = ne.flipped ? reverse(op) : op;
    LinExpr complement = detail::guard_complement(ne.expr, level);
    int rhs = a.esets.index_of(level, complement);
    if (rhs < 0) throw std::logic_error("comparison complement missing from E_" + std::to_string(level));
    int lhs = ne.expr.coeff(level).is_zero() ? a.esets.zero_index(level) : a.esets.clock_index(level);
    return n.pre[static_cast<std::size_t>(level - 1)].compare(lhs, eff, rhs);
}

/// Classical CTL fixpoint evaluation over the class graph, with the maximal-
/// run reading of until: positions before the witness satisfy φ ∨ ψ, and
/// maximal-run ends are nodes without edges plus time-divergent Post fixpoints.
/// Returns one truth value per node for the whole formula.
inline std::vector<bool> ctl_check(const Analysis& a, const ClassGraph& g, const Formula& f) {
    std::size_t n = g.nodes.size();
    auto eval = [&](const Formula& sub, auto&& self) -> std::vector<bool> {
        std::vector<bool> out(n, false);
        switch (sub.kind) {
            case Formula::Kind::True:
                out.assign(n, true);
                return out;
            case Formula::Kind::False:
                return out;
            case Formula::Kind::Atom: {
                for (std::size_t i = 0; i < n; ++i) {
                    const StateDecl& s =
                        a.model.states[static_cast<std::size_t>(g.nodes[i].state)];
                    out[i] = s.labels.count(sub.atom) > 0;
                }
                return out;
            }
            case Formula::Kind::Compare: {
                for (std::size_t i = 0; i < n; ++i)
                    out[i] = class_satisfies_comparison(a, g.nodes[i], sub.compare_expr, sub.compare_op);
                return out;
            }
            case Formula::Kind::Not: {
                out = self(*sub.args[0], self);
                out.flip();
                return out;
            }
            case Formula::Kind::And: {
                out = self(*sub.args[0], self);
                std::vector<bool> rhs = self(*sub.args[1], self);
                for (std::size_t i = 0; i < n; ++i) out[i] = out[i] && rhs[i];
                return out;
            }
            case Formula::Kind::Or: {
                out = self(*sub.args[0], self);
                std::vector<bool> rhs = self(*sub.args[1], self);
                for (std::size_t i = 0; i < n; ++i) out[i] = out[i] || rhs[i];
                return out;
            }
            case Formula::Kind::Until: {
                if (sub.bounded)
                    throw std::logic_error("bounded until is a TCTL_p formula, not TCTL_c^int");
                std::vector<bool> phi = self(*sub.args[0], self);
                std::vector<bool> psi = self(*sub.args[1], self);
                std::vector<bool> x(n, false);
                if (!sub.universal) {
                    // EU least fixpoint via backward worklist
                    std::vector<std::vector<int>> preds(n);
                    for (std::size_t e = 0; e < g.edges.size(); ++e)
                        preds[static_cast<std::size_t>(g.edges[e].dst)].push_back(g.edges[e].src);
                    std::deque<int> work;
                    for (std::size_t i = 0; i < n; ++i)
                        if (psi[i]) {
                            x[i] = true;
                            work.push_back(static_cast<int>(i));
                        }
                    while (!work.empty()) {
                        int cur = work.front();
                        work.pop_front();
                        for (int p : preds[static_cast<std::size_t>(cur)]) {
                            auto pi = static_cast<std::size_t>(p);
                            if (!x[pi] && (phi[pi] || psi[pi])) {
                                x[pi] = true;
                                work.push_back(p);
                            }
                        }
                    }
                } else {
                    // AU least fixpoint; terminal and divergent nodes satisfy the
                    // until only through ψ.
                    bool changed = true;
                    while (changed) {
                        changed = false;
                        for (std::size_t i = 0; i < n; ++i) {
                            if (x[i]) continue;
                            if (psi[i]) {
                                x[i] = true;
                                changed = true;
                                continue;
                            }
                            if (!(phi[i] || psi[i])) continue;
                            if (g.divergent[i]) continue;
                            const auto& outs = g.out[i];
                            if (outs.empty()) continue;
                            bool all = true;
                            for (int e : outs)
                                if (!x[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].dst)]) {
                                    all = false;
                                    break;
                                }
                            if (all) {
                                x[i] = true;
                                changed = true;
                            }
                        }
                    }
                }
                return x;
            }
        }
        return out;
    };
    return eval(f, eval);
}

struct CIntResult {
    bool verdict = false;
    Analysis analysis;
    ClassGraph graph;
    std::vector<bool> holds;  // per node, for the whole formula
};

/// TCTL_c^int model checking: extended expression sets seeded with the
/// formula's comparisons, class-graph exploration, comparison labeling, and a
/// classical CTL fixpoint pass.
inline CIntResult check_tctl_cint(const ITAModel& m, const Formula& f,
                                  const ExpressionBuildOptions& eopts = {},
                                  const ExploreOptions& xopts = {}) {
    std::vector<LinExpr> comparisons;
    collect_comparisons(f, comparisons);
    CIntResult res{false, analyze(m, comparisons, eopts), {}, {}};
    res.graph = explore(res.analysis, xopts);
    res.holds = ctl_check(res.analysis, res.graph, f);
    res.verdict = res.holds[static_cast<std::size_t>(res.graph.initial)];
    return res;
}

// ---------------------------------------------------------------------------
// TCTL_p: duration-subscripted until over propositions
// ---------------------------------------------------------------------------

using StatePred = std::function<bool(const StateDecl&)>;

/// Evaluates a propositional formula against one state's labels.
inline bool eval_prop(const Formula& f, const StateDecl& s) {
    switch (f.kind) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::Atom: return s.labels.count(f.atom) > 0;
        case Formula::Kind::Not: return !eval_prop(*f.args[0], s);
        case Formula::Kind::And: return eval_prop(*f.args[0], s) && eval_prop(*f.args[1], s);
        case Formula::Kind::Or: return eval_prop(*f.args[0], s) || eval_prop(*f.args[1], s);
        default: throw std::logic_error("not a propositional formula");
    }
}

inline StatePred pred_of(const FormulaPtr& f) {
    return [f](const StateDecl& s) { return eval_prop(*f, s); };
}

struct TctlPOptions {
    int depth = 64;  // mirrors the bounded-reachability search depth
    std::size_t max_paths = 50000;  // budget; exhaustion makes the result incomplete
    bool disable_procedure1 = false;  // test hook: force the pumping procedure
};

struct TctlPOutcome {
    bool verdict = false;
    bool complete = false;
    std::string procedure;  // which procedure decided
    std::optional<Run> witness;  // witness run (EU) or counterexample prefix (AU)
};

namespace detail {

/// DFS state shared by the bounded TCTL_p procedures.
struct PathSearch {
    const ITAModel& m;
    const TctlPOptions& opts;
    std::size_t explored = 0;
    bool depth_cut = false;

    template <typename Visit>
    void run(int max_depth, bool prune, const StatePred& p, const Visit& visit) {
        PathCandidate path;
        PathEncoding enc = encode_path(m, path);
        rec(path, enc, max_depth, prune, p, visit);
    }

    template <typename Visit>
    bool rec(PathCandidate& path, const PathEncoding& enc, int max_depth, bool prune,
             const StatePred& p, const Visit& visit) {
        if (explored >= opts.max_paths) {
            depth_cut = true;  // budget exhausted: the verdict is not complete
            return false;
        }
        ++explored;
        if (visit(path, enc)) return true;
        const StateDecl& cur = m.states[static_cast<std::size_t>(enc.current_state)];
        if (prune && !p(cur)) return false;  // deeper witnesses need p here
        if (static_cast<int>(path.transitions.size()) >= max_depth) {
            if (!m.outgoing[static_cast<std::size_t>(enc.current_state)].empty()) depth_cut = true;
            return false;
        }
        for (int tid : m.outgoing[static_cast<std::size_t>(enc.current_state)]) {
            PathEncoding next = enc;
            encode_transition(m, next, tid);
            if (!feasible(next.sys).feasible) continue;
            path.transitions.push_back(tid);
            bool done = rec(path, next, max_depth, prune, p, visit);
            path.transitions.pop_back();
            if (done) return true;
        }
        return false;
    }
};

inline LinExpr total_delay(const PathEncoding& enc) {
    LinExpr sum;
    for (int d : enc.delay_vars) sum += LinExpr::clock(d);
    return sum;
}

inline Run run_from(const PathCandidate& path, const PathEncoding& enc, const Feasibility& f) {
    Run run;
    for (std::size_t j = 0; j < path.transitions.size(); ++j) {
        run.push_back(RunStep::time(f.value(enc.delay_vars[j])));
        run.push_back(RunStep::fire(path.transitions[j]));
    }
    return run;
}

}  // namespace detail

/// E p U_{<=a} r (strict: <). Bounded path enumeration; a witness position is
/// the entry of an r-state with p holding at every earlier state and entry time
/// within the bound.
inline TctlPOutcome check_EU_bounded_below(const ITAModel& m, const StatePred& p, const StatePred& r,
                                           const Rational& a, bool strict,
                                           const TctlPOptions& opts = {}) {
    TctlPOutcome out;
    detail::PathSearch search{m, opts};
    search.run(opts.depth, true, p, [&](const PathCandidate& path, const PathEncoding& enc) {
        const StateDecl& cur = m.states[static_cast<std::size_t>(enc.current_state)];
        if (!r(cur)) return false;
        LinConstraintSystem sys = enc.sys;
        sys.add(detail::total_delay(enc) - LinExpr(a), strict ? Comparator::LT : Comparator::LE);
        Feasibility f = feasible(sys);
        if (!f.feasible) return false;
        out.verdict = true;
        out.witness = detail::run_from(path, enc, f);
        return true;
    });
    out.procedure = "bounded-path";
    out.complete = out.verdict || !search.depth_cut;
    return out;
}

namespace detail {

/// Pumping side conditions of the second E p U_{>=a} r procedure: a repeated
/// transition e at positions i < j (0-based into the path) whose segment can be
/// iterated to accumulate arbitrary duration.
struct PumpCandidate {
    std::size_t i, j;
    bool updates_active;  // e updates x_{level(e)}
};

inline std::vector<PumpCandidate> pump_candidates(const ITAModel& m, const PathCandidate& path) {
    std::vector<PumpCandidate> out;
    const auto& ts = path.transitions;
    auto touches_below = [&](int tid, int level) {
        for (const auto& [clock, expr] : m.transitions[static_cast<std::size_t>(tid)]
                                             .update.assignments())
            if (clock < level) return true;
        return false;
    };
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const TransitionDecl& e = m.transitions[static_cast<std::size_t>(ts[i])];
        int k = m.level_of(e.source);
        bool e_updates = !e.update.is_identity(k);
        if (touches_below(ts[i], k)) continue;  // segment must leave clocks < k alone
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            const TransitionDecl& tj = m.transitions[static_cast<std::size_t>(ts[j])];
            if (m.level_of(tj.source) < k) break;  // segment dipped below level k
            if (touches_below(ts[j], k)) break;
            if (ts[j] != ts[i]) continue;
            // σ = transitions strictly between i and j, all at level >= k and
            // leaving clocks below k untouched.
            if (e_updates) {
                out.push_back({i, j, true});
            } else {
                bool clean = true;
                for (std::size_t s = i + 1; s <= j && clean; ++s)
                    if (!m.transitions[static_cast<std::size_t>(ts[s])].update.is_identity(k))
                        clean = false;
                if (clean) out.push_back({i, j, false});
            }
        }
    }
    return out;
}

}  // namespace detail

/// E p U_{>=a} r (strict: >). Procedure 1 searches bounded paths whose total
/// duration meets the bound. When it fails, procedure 2 searches paths up to
/// twice the depth exhibiting a repeatable time-elapsing segment (the pumping
/// argument); the emitted witness unrolls the pump far enough to pass the bound.
inline TctlPOutcome check_EU_bounded_above(const ITAModel& m, const StatePred& p, const StatePred& r,
                                           const Rational& a, bool strict,
                                           const TctlPOptions& opts = {}) {
    TctlPOutcome out;
    bool p1_cut = false;
    if (!opts.disable_procedure1) {
        detail::PathSearch search{m, opts};
        search.run(opts.depth, true, p, [&](const PathCandidate& path, const PathEncoding& enc) {
            const StateDecl& cur = m.states[static_cast<std::size_t>(enc.current_state)];
            if (!r(cur)) return false;
            LinConstraintSystem sys = enc.sys;
            sys.add(LinExpr(a) - detail::total_delay(enc), strict ? Comparator::LT : Comparator::LE);
            Feasibility f = feasible(sys);
            if (!f.feasible) return false;
            out.verdict = true;
            out.witness = detail::run_from(path, enc, f);
            return true;
        });
        if (out.verdict) {
            out.procedure = "bounded-path";
            out.complete = true;
            return out;
        }
        p1_cut = search.depth_cut;
    }

    // Procedure 2: pumping over paths of length <= 2*depth + 1.
    detail::PathSearch search{m, opts};
    search.run(2 * opts.depth + 1, true, p, [&](const PathCandidate& path, const PathEncoding& enc) {
        const StateDecl& cur = m.states[static_cast<std::size_t>(enc.current_state)];
        if (!r(cur)) return false;
        for (const detail::PumpCandidate& c : detail::pump_candidates(m, path)) {
            LinConstraintSystem sys = enc.sys;
            LinExpr seg;
            for (std::size_t g = c.i + 1; g <= c.j; ++g) seg += LinExpr::clock(enc.delay_vars[g]);
            sys.add(-seg, Comparator::LT);  // time elapses across σe
            if (!c.updates_active) {
                int k = m.level_of(
                    m.transitions[static_cast<std::size_t>(path.transitions[c.i])].source);
                for (std::size_t g = c.i + 1; g <= c.j; ++g) {
                    int src = m.transitions[static_cast<std::size_t>(path.transitions[g])].source;
                    if (m.level_of(src) == k)
                        sys.add(LinExpr::clock(enc.delay_vars[g]), Comparator::EQ);  // = 0
                }
            }
            Feasibility f = feasible(sys);
            if (!f.feasible) continue;
            // Unroll the pump: repeat steps (i, j] until the duration passes a.
            Run base = detail::run_from(path, enc, f);
            Rational delta;
            for (std::size_t g = c.i + 1; g <= c.j; ++g) delta += f.value(enc.delay_vars[g]);
            Rational total;
            for (std::size_t g = 0; g < path.transitions.size(); ++g)
                total += f.value(enc.delay_vars[g]);
            Run pumped(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(2 * (c.j + 1)));
            Rational time = total;
            while (time < a || (strict && time == a)) {
                for (std::size_t s = 2 * (c.i + 1); s < 2 * (c.j + 1); ++s) pumped.push_back(base[s]);
                time += delta;
            }
            pumped.insert(pumped.end(), base.begin() + static_cast<std::ptrdiff_t>(2 * (c.j + 1)),
                          base.end());
            out.verdict = true;
            out.witness = std::move(pumped);
            return true;
        }
        return false;
    });
    if (out.verdict) {
        out.procedure = "pumping";
        out.complete = true;
    } else {
        out.procedure = opts.disable_procedure1 ? "pumping" : "bounded-path+pumping";
        out.complete = !p1_cut && !search.depth_cut;
    }
    return out;
}

namespace detail {

/// Stuck nodes: no discrete edge is firable from the node or anywhere along its
/// time-successor chain (the configuration can never fire again).
inline std::vector<bool> stuck_nodes(const ClassGraph& g) {
    std::vector<int> memo(g.nodes.size(), -1);
    std::function<bool(int)> rec = [&](int n) -> bool {
        auto ni = static_cast<std::size_t>(n);
        if (memo[ni] >= 0) return memo[ni] == 1;
        bool stuck = !g.has_discrete_out(n);
        if (stuck) {
            int te = g.time_edge(n);
            if (te >= 0) stuck = rec(g.edges[static_cast<std::size_t>(te)].dst);
        }
        memo[ni] = stuck ? 1 : 0;
        return stuck;
    };
    std::vector<bool> out(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) out[i] = rec(static_cast<int>(i));
    return out;
}

/// Nodes from which a cycle containing a discrete edge is reachable inside the
/// subgraph selected by `keep`. With `keep` = ¬r this finds the nodes that doom
/// r forever along some run; with `keep` = true it finds every node admitting
/// an infinite continuation with infinitely many discrete steps.
inline std::vector<bool> cycle_doomed_nodes(const ClassGraph& g, const std::vector<bool>& keep) {
    std::size_t n = g.nodes.size();
    const std::vector<bool>& not_r = keep;

    // Tarjan SCC over the ¬r subgraph.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> onstack(n, false);
    std::vector<int> stack;
    int next_index = 0, next_comp = 0;
    std::function<void(int)> strongconnect = [&](int v) {
        auto vi = static_cast<std::size_t>(v);
        index[vi] = low[vi] = next_index++;
        stack.push_back(v);
        onstack[vi] = true;
        for (int e : g.out[vi]) {
            int w = g.edges[static_cast<std::size_t>(e)].dst;
            auto wi = static_cast<std::size_t>(w);
            if (!not_r[wi]) continue;
            if (index[wi] < 0) {
                strongconnect(w);
                low[vi] = std::min(low[vi], low[wi]);
            } else if (onstack[wi]) {
                low[vi] = std::min(low[vi], index[wi]);
            }
        }
        if (low[vi] == index[vi]) {
            while (true) {
                int w = stack.back();
                stack.pop_back();
                onstack[static_cast<std::size_t>(w)] = false;
                comp[static_cast<std::size_t>(w)] = next_comp;
                if (w == v) break;
            }
            ++next_comp;
        }
    };
    for (std::size_t i = 0; i < n; ++i)
        if (not_r[i] && index[i] < 0) strongconnect(static_cast<int>(i));

    // SCC qualifies when it contains an internal discrete edge.
    std::vector<bool> scc_bad(static_cast<std::size_t>(next_comp), false);
    for (const ClassEdge& e : g.edges) {
        if (e.time) continue;
        auto si = static_cast<std::size_t>(e.src), di = static_cast<std::size_t>(e.dst);
        if (not_r[si] && not_r[di] && comp[si] >= 0 && comp[si] == comp[di])
            scc_bad[static_cast<std::size_t>(comp[si])] = true;
    }

    // Backward closure through ¬r nodes.
    std::vector<bool> doomed(n, false);
    std::deque<int> work;
    for (std::size_t i = 0; i < n; ++i)
        if (not_r[i] && comp[i] >= 0 && scc_bad[static_cast<std::size_t>(comp[i])]) {
            doomed[i] = true;
            work.push_back(static_cast<int>(i));
        }
    std::vector<std::vector<int>> preds(n);
    for (const ClassEdge& e : g.edges)
        preds[static_cast<std::size_t>(e.dst)].push_back(e.src);
    while (!work.empty()) {
        int cur = work.front();
        work.pop_front();
        for (int p : preds[static_cast<std::size_t>(cur)]) {
            auto pi = static_cast<std::size_t>(p);
            if (!doomed[pi] && not_r[pi]) {
                doomed[pi] = true;
                work.push_back(p);
            }
        }
    }
    return doomed;
}

/// Adds the class-membership constraints for node preorders evaluated on the
/// symbolic final clock values of a path encoding.
inline void add_membership(const Analysis& a, const ClassNode& node, const PathEncoding& enc,
                           LinConstraintSystem& sys) {
    Update symbolic;
    for (std::size_t c = 0; c < enc.clocks.size(); ++c)
        symbolic.set(static_cast<int>(c) + 1, enc.clocks[c]);
    for (std::size_t k = 0; k < node.pre.size(); ++k) {
        const auto& ek = a.esets.at(static_cast<int>(k) + 1);
        const auto& blocks = node.pre[k].blocks();
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (std::size_t i = 0; i + 1 < blocks[b].size(); ++i) {
                LinExpr d = substitute(ek[static_cast<std::size_t>(blocks[b][i])], symbolic) -
                            substitute(ek[static_cast<std::size_t>(blocks[b][i + 1])], symbolic);
                sys.add(std::move(d), Comparator::EQ);
            }
            if (b + 1 < blocks.size()) {
                LinExpr d = substitute(ek[static_cast<std::size_t>(blocks[b].back())], symbolic) -
                            substitute(ek[static_cast<std::size_t>(blocks[b + 1].front())], symbolic);
                sys.add(std::move(d), Comparator::LT);
            }
        }
    }
}

/// Tag a configuration entering this class by a discrete step (β = ⊥) gets.
inline ClassTag discrete_entry_tag(const Analysis& a, const ClassNode& n) {
    return entry_tag(n.state, n.pre, a.model, a.esets, false);
}

}  // namespace detail

/// A p U_{>=a} r (strict: >). FALSE iff some maximal run has no witness
/// position: the search enumerates bounded path prefixes, encodes "no r-and-
/// p-clean entry position meets the bound" as linear constraints, and
/// legitimizes the prefix as a maximal behavior by (a) idling forever in a
/// non-urgent final state, (b) being stuck in an urgent final state (checked on
/// the class graph), or (c) entering an all-¬r cycle of the class graph.
inline TctlPOutcome check_AU_bounded_above(const ITAModel& m, const StatePred& p, const StatePred& r,
                                           const Rational& a, bool strict,
                                           const TctlPOptions& opts = {}) {
    Analysis analysis = analyze(m);
    ClassGraph graph = explore(analysis);
    std::vector<bool> stuck = detail::stuck_nodes(graph);
    std::vector<bool> not_r(graph.nodes.size()), everything(graph.nodes.size(), true);
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        not_r[i] = !r(analysis.model.states[static_cast<std::size_t>(graph.nodes[i].state)]);
    std::vector<bool> doomed = detail::cycle_doomed_nodes(graph, not_r);
    // once a ¬p position occurred, any infinite continuation is witness-free
    std::vector<bool> cycling = detail::cycle_doomed_nodes(graph, everything);

    TctlPOutcome out;
    out.verdict = true;

    // Adds, for every prefix position that could witness the until, the
    // constraint that its entry time misses the bound.
    auto add_no_witness = [&](const PathCandidate& path, const PathEncoding& enc,
                              LinConstraintSystem& sys) {
        bool p_clean = true;
        LinExpr t;  // entry time of position m
        for (std::size_t pos = 0; pos <= path.transitions.size(); ++pos) {
            int state = pos == 0 ? m.initial
                                 : m.transitions[static_cast<std::size_t>(path.transitions[pos - 1])].target;
            if (pos > 0) t += LinExpr::clock(enc.delay_vars[pos - 1]);
            const StateDecl& s = m.states[static_cast<std::size_t>(state)];
            if (r(s) && p_clean)
                sys.add(t - LinExpr(a), strict ? Comparator::LE : Comparator::LT);
            if (!p(s)) p_clean = false;
        }
    };

    detail::PathSearch search{m, opts};
    StatePred no_prune = [](const StateDecl&) { return true; };
    search.run(opts.depth, false, no_prune, [&](const PathCandidate& path, const PathEncoding& enc) {
        const StateDecl& last = m.states[static_cast<std::size_t>(enc.current_state)];

        auto try_cex = [&](const LinConstraintSystem& base, const char* procedure) {
            Feasibility f = feasible(base);
            if (!f.feasible) return false;
            out.verdict = false;
            out.procedure = procedure;
            out.witness = detail::run_from(path, enc, f);
            return true;
        };

        if (last.policy != Policy::Urgent) {
            // idling forever is always a maximal continuation here, and with
            // entry positions it subsumes the cycle case for this prefix
            LinConstraintSystem sys = enc.sys;
            add_no_witness(path, enc, sys);
            if (try_cex(sys, "idle-divergence")) return true;
            return false;
        }
        bool poisoned = false;  // a ¬p prefix position kills every later witness
        for (std::size_t pos = 0; pos <= path.transitions.size(); ++pos) {
            int state = pos == 0 ? m.initial
                                 : m.transitions[static_cast<std::size_t>(path.transitions[pos - 1])]
                                       .target;
            if (!p(m.states[static_cast<std::size_t>(state)])) poisoned = true;
        }
        for (std::size_t node = 0; node < graph.nodes.size(); ++node) {
            bool usable = stuck[node] || doomed[node] || (poisoned && cycling[node]);
            if (!usable) continue;
            const ClassNode& cn = graph.nodes[node];
            if (cn.state != enc.current_state) continue;
            if (cn.tag != detail::discrete_entry_tag(analysis, cn)) continue;
            LinConstraintSystem sys = enc.sys;
            detail::add_membership(analysis, cn, enc, sys);
            add_no_witness(path, enc, sys);
            if (try_cex(sys, stuck[node] ? "stuck-maximal" : "cycle-counterexample")) return true;
        }
        return false;
    });
    if (!out.verdict) {
        out.complete = true;
    } else {
        out.procedure = "counterexample-search";
        out.complete = !search.depth_cut;
    }
    return out;
}

/// A p U_{<=a} r = (A p U_{>=0} r) ∧ ¬(E ¬r U_{>a} true);
/// A p U_{<a} r  = (A p U_{>=0} r) ∧ ¬(E ¬r U_{>=a} true).
inline TctlPOutcome check_AU_bounded_below(const ITAModel& m, const StatePred& p, const StatePred& r,
                                           const Rational& a, bool strict,
                                           const TctlPOptions& opts = {}) {
    TctlPOutcome au = check_AU_bounded_above(m, p, r, Rational(0), false, opts);
    StatePred not_r = [&r](const StateDecl& s) { return !r(s); };
    StatePred truth = [](const StateDecl&) { return true; };
    TctlPOutcome eu = check_EU_bounded_above(m, not_r, truth, a, !strict, opts);
    TctlPOutcome out;
    out.verdict = au.verdict && !eu.verdict;
    out.procedure = "duality(" + au.procedure + ", " + eu.procedure + ")";
    if (!au.verdict)
        out.complete = au.complete;
    else if (eu.verdict)
        out.complete = eu.complete;
    else
        out.complete = au.complete && eu.complete;
    if (!au.verdict && au.witness)
        out.witness = au.witness;
    else if (eu.verdict && eu.witness)
        out.witness = eu.witness;
    return out;
}

}  // namespace ita

#endif  // ITA_TCTL_HPP
