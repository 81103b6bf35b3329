#ifndef ITA_CLASSGRAPH_HPP
#define ITA_CLASSGRAPH_HPP

#include "ita/expressions.hpp"
#include "ita/semantics.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ita {

/// Total preorder over the expressions of one E_k, stored as an ordered
/// partition: blocks in strictly increasing value, ties inside a block.
class Preorder {
public:
    Preorder() = default;
    explicit Preorder(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
        rebuild();
    }

    static Preorder from_values(const std::vector<Rational>& values) {
        std::map<Rational, std::vector<int>> grouped;
        for (std::size_t i = 0; i < values.size(); ++i)
            grouped[values[i]].push_back(static_cast<int>(i));
        std::vector<std::vector<int>> blocks;
        blocks.reserve(grouped.size());
        for (auto& [v, idxs] : grouped) blocks.push_back(std::move(idxs));
        return Preorder(std::move(blocks));
    }

    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int block_of(int expr) const { return block_.at(static_cast<std::size_t>(expr)); }
    int size() const { return static_cast<int>(block_.size()); }

    bool leq(int a, int b) const { return block_of(a) <= block_of(b); }
    bool eq(int a, int b) const { return block_of(a) == block_of(b); }
    bool lt(int a, int b) const { return block_of(a) < block_of(b); }

    bool compare(int a, Comparator op, int b) const {
        int d = block_of(a) - block_of(b);
        return comparator_holds(d, op);
    }

    void set_blocks(std::vector<std::vector<int>> blocks) {
        blocks_ = std::move(blocks);
        rebuild();
    }

    friend bool operator==(const Preorder& a, const Preorder& b) { return a.blocks_ == b.blocks_; }
    friend bool operator<(const Preorder& a, const Preorder& b) { return a.blocks_ < b.blocks_; }

    std::string render(const ExpressionSets& es, int level) const {
        std::string out;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            if (b) out += " < ";
            for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
                if (i) out += " = ";
                out += es.at(level)[static_cast<std::size_t>(blocks_[b][i])].str();
            }
        }
        return out;
    }

private:
    void rebuild() {
        int count = 0;
        for (auto& blk : blocks_) {
            std::sort(blk.begin(), blk.end());
            count += static_cast<int>(blk.size());
        }
        block_.assign(static_cast<std::size_t>(count), -1);
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            for (int e : blocks_[b]) block_.at(static_cast<std::size_t>(e)) = static_cast<int>(b);
    }

    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_;  // expr index -> block index
};

/// Delayed-policy splitting tag. `Minus` marks the discrete-entry copy of a
/// time-closed class of a delayed state (no discrete steps until time passes).
enum class ClassTag { Open, Minus, Plus };

inline std::string class_tag_str(ClassTag t) {
    switch (t) {
        case ClassTag::Open: return "open";
        case ClassTag::Minus: return "minus";
        case ClassTag::Plus: return "plus";
    }
    return "?";
}

struct ClassNode {
    int state = -1;
    std::vector<Preorder> pre;  // one per level 1..level_of(state)
    ClassTag tag = ClassTag::Open;

    friend bool operator==(const ClassNode& a, const ClassNode& b) {
        return a.state == b.state && a.tag == b.tag && a.pre == b.pre;
    }
    friend bool operator<(const ClassNode& a, const ClassNode& b) {
        if (a.state != b.state) return a.state < b.state;
        if (a.tag != b.tag) return a.tag < b.tag;
        return a.pre < b.pre;
    }
};

struct ClassEdge {
    int src = -1;
    int dst = -1;
    bool time = false;
    int transition = -1;  // -1 for time edges
};

struct ClassGraph {
    std::vector<ClassNode> nodes;
    std::vector<ClassEdge> edges;
    std::vector<std::vector<int>> out;  // per node: edge ids
    std::vector<bool> divergent;        // Post fixpoint reached, time diverges in place
    int initial = -1;
    std::vector<int> accepting;

    bool has_discrete_out(int node) const {
        for (int e : out[static_cast<std::size_t>(node)])
            if (!edges[static_cast<std::size_t>(e)].time) return true;
        return false;
    }
    int time_edge(int node) const {
        for (int e : out[static_cast<std::size_t>(node)])
            if (edges[static_cast<std::size_t>(e)].time) return e;
        return -1;
    }
};

/// Normalized model plus its expression sets; every class-graph operation is
/// relative to one of these.
struct Analysis {
    ITAModel model;  // guards normalized
    ExpressionSets esets;
};

inline Analysis analyze(const ITAModel& m, const std::vector<LinExpr>& comparisons = {},
                        const ExpressionBuildOptions& opts = {}) {
    return Analysis{normalize_guards(m), build_expression_sets_with_formula(m, comparisons, opts)};
}

namespace detail {

/// Whether x_{level} sits in a non-singleton block (any positive delay changes
/// the ordering of E_{level}).
inline bool time_closed_at(const Preorder& p, const ExpressionSets& es, int level) {
    int xk = es.clock_index(level);
    return p.blocks()[static_cast<std::size_t>(p.block_of(xk))].size() > 1;
}

inline bool node_time_closed(const ClassNode& n, const ITAModel& m, const ExpressionSets& es) {
    int level = m.level_of(n.state);
    return time_closed_at(n.pre[static_cast<std::size_t>(level - 1)], es, level);
}

inline ClassTag entry_tag(int state, const std::vector<Preorder>& pre, const ITAModel& m,
                          const ExpressionSets& es, bool by_time) {
    if (m.policy_of(state) != Policy::Delayed) return ClassTag::Open;
    int level = m.level_of(state);
    if (!time_closed_at(pre[static_cast<std::size_t>(level - 1)], es, level)) return ClassTag::Open;
    return by_time ? ClassTag::Plus : ClassTag::Minus;
}

}  // namespace detail

/// The class containing (q0, 0, ⊥): order every expression by its value at 0.
inline ClassNode initial_class(const Analysis& a) {
    const ITAModel& m = a.model;
    ClassNode n;
    n.state = m.initial;
    Valuation zero(m.clock_count);
    int level = m.level_of(n.state);
    for (int k = 1; k <= level; ++k) {
        std::vector<Rational> vals;
        for (const LinExpr& e : a.esets.at(k)) vals.push_back(e.evaluate(zero));
        n.pre.push_back(Preorder::from_values(vals));
    }
    n.tag = detail::entry_tag(n.state, n.pre, m, a.esets, false);
    return n;
}

/// The unique class whose semantics contains the configuration.
inline ClassNode class_of(const Analysis& a, const Configuration& c) {
    ClassNode n;
    n.state = c.state;
    int level = a.model.level_of(c.state);
    for (int k = 1; k <= level; ++k) {
        std::vector<Rational> vals;
        for (const LinExpr& e : a.esets.at(k)) vals.push_back(e.evaluate(c.v));
        n.pre.push_back(Preorder::from_values(vals));
    }
    n.tag = detail::entry_tag(n.state, n.pre, a.model, a.esets, c.beta);
    return n;
}

namespace detail {

/// Firability of a normalized guard atom on the preorders: compare
/// alpha*x_k (x_k when alpha = 1, else 0) against the complement expression.
inline bool atom_firable(const GuardAtom& atom, const Preorder& pk, const ExpressionSets& es,
                         int level) {
    Rational alpha = atom.expr.coeff(level);
    LinExpr complement = guard_complement(atom.expr, level);
    int rhs = es.index_of(level, complement);
    if (rhs < 0) throw std::logic_error("guard complement missing from E_" + std::to_string(level));
    int lhs = alpha.is_zero() ? es.zero_index(level) : es.clock_index(level);
    return pk.compare(lhs, atom.op, rhs);
}

}  // namespace detail

/// Discrete successor, or nullopt when the transition is not firable from the
/// class (guard ordering fails, or the class is a delayed minus copy).
inline std::optional<ClassNode> discrete_successor(const Analysis& a, const ClassNode& cl,
                                                   int transition) {
    const ITAModel& m = a.model;
    const ExpressionSets& es = a.esets;
    const TransitionDecl& t = m.transitions.at(static_cast<std::size_t>(transition));
    if (t.source != cl.state) return std::nullopt;
    if (cl.tag == ClassTag::Minus) return std::nullopt;

    int lq = m.level_of(t.source);
    const Preorder& plq = cl.pre[static_cast<std::size_t>(lq - 1)];
    for (const GuardAtom& atom : t.guard)
        if (!detail::atom_firable(atom, plq, es, lq)) return std::nullopt;

    int lq2 = m.level_of(t.target);
    ClassNode out;
    out.state = t.target;
    for (int k = 1; k <= lq2; ++k) {
        const auto& ek = es.at(k);
        int sz = static_cast<int>(ek.size());
        if (k <= lq) {
            const Preorder& pk = cl.pre[static_cast<std::size_t>(k - 1)];
            // g' <= h' iff g'[u] <= h'[u]; both substituted forms are in E_k.
            std::vector<int> sub(static_cast<std::size_t>(sz));
            for (int i = 0; i < sz; ++i) {
                int idx = es.index_of(k, substitute(ek[static_cast<std::size_t>(i)], t.update));
                if (idx < 0)
                    throw std::logic_error("update closure missing in E_" + std::to_string(k));
                sub[static_cast<std::size_t>(i)] = pk.block_of(idx);
            }
            std::map<int, std::vector<int>> grouped;
            for (int i = 0; i < sz; ++i) grouped[sub[static_cast<std::size_t>(i)]].push_back(i);
            std::vector<std::vector<int>> blocks;
            for (auto& [key, idxs] : grouped) blocks.push_back(std::move(idxs));
            out.pre.emplace_back(std::move(blocks));
        } else {
            // k above the source level: decide each pair by normalizing the
            // difference down to the source level and consulting its preorder.
            // The saturation stored one orientation of every difference, so the
            // alpha = 0 case may have to flip comparison sides.
            auto leq = [&](int i, int j) {
                if (i == j) return true;
                LinExpr d = substitute(ek[static_cast<std::size_t>(i)], t.update) -
                            substitute(ek[static_cast<std::size_t>(j)], t.update);
                Rational clq = d.coeff(lq);
                if (clq.is_zero()) {
                    // d <= 0 iff 0 <= -d, or equivalently d <= 0 with sides swapped
                    int neg = es.index_of(lq, -d);
                    if (neg >= 0) return plq.leq(es.zero_index(lq), neg);
                    int pos = es.index_of(lq, d);
                    if (pos >= 0) return plq.leq(pos, es.zero_index(lq));
                    throw std::logic_error("level difference missing in E_" + std::to_string(lq));
                }
                NormalizedExpr nd = normalize(d, lq);
                int rhs = es.index_of(lq, detail::guard_complement(nd.expr, lq));
                if (rhs < 0)
                    throw std::logic_error("level difference missing in E_" + std::to_string(lq));
                int lhs = es.clock_index(lq);
                return clq.sign() > 0 ? plq.leq(lhs, rhs) : plq.leq(rhs, lhs);
            };
            std::vector<int> order(static_cast<std::size_t>(sz));
            for (int i = 0; i < sz; ++i) order[static_cast<std::size_t>(i)] = i;
            std::sort(order.begin(), order.end(), [&](int i, int j) {
                bool ij = leq(i, j), ji = leq(j, i);
                if (ij != ji) return ij;
                return i < j;
            });
            std::vector<std::vector<int>> blocks;
            for (int idx : order) {
                if (!blocks.empty() && leq(idx, blocks.back().front()) &&
                    leq(blocks.back().front(), idx)) {
                    blocks.back().push_back(idx);
                } else {
                    blocks.push_back({idx});
                }
            }
            out.pre.emplace_back(std::move(blocks));
        }
    }
    out.tag = detail::entry_tag(out.state, out.pre, m, es, false);
    return out;
}

/// Post(R): lets the active clock grow until the ordering of E_{level} changes.
/// Case 1 (x_k alone and greatest) returns the class unchanged.
inline ClassNode time_successor(const Analysis& a, const ClassNode& cl) {
    const ITAModel& m = a.model;
    int level = m.level_of(cl.state);
    int xk = a.esets.clock_index(level);
    ClassNode out = cl;
    Preorder& p = out.pre[static_cast<std::size_t>(level - 1)];
    std::vector<std::vector<int>> blocks = p.blocks();
    std::size_t b = static_cast<std::size_t>(p.block_of(xk));
    if (blocks[b].size() == 1) {
        if (b + 1 == blocks.size()) {
            // greatest singleton: Post(R) = R
        } else {
            blocks[b + 1].push_back(xk);
            blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(b));
        }
    } else {
        blocks[b].erase(std::find(blocks[b].begin(), blocks[b].end(), xk));
        blocks.insert(blocks.begin() + static_cast<std::ptrdiff_t>(b) + 1, {xk});
    }
    p.set_blocks(std::move(blocks));
    out.tag = detail::entry_tag(out.state, out.pre, m, a.esets, true);
    return out;
}

struct ExploreOptions {
    std::size_t max_nodes = 100000;
    int jobs = 1;
};

/// BFS over discrete and time successors from the initial class. Reachable
/// classes are nonempty by construction, so no emptiness filtering is needed.
/// Post fixpoints are stored without a self-loop and flagged divergent.
inline ClassGraph explore(const Analysis& a, const ExploreOptions& opts = {}) {
    const ITAModel& m = a.model;
    ClassGraph g;
    std::map<ClassNode, int> ids;

    auto intern = [&](const ClassNode& n) {
        auto it = ids.find(n);
        if (it != ids.end()) return it->second;
        if (g.nodes.size() >= opts.max_nodes) throw cap_error("class-graph node cap exceeded");
        int id = static_cast<int>(g.nodes.size());
        ids.emplace(n, id);
        g.nodes.push_back(n);
        g.out.emplace_back();
        g.divergent.push_back(false);
        if (m.states[static_cast<std::size_t>(n.state)].is_final) g.accepting.push_back(id);
        return id;
    };

    struct Succ {
        ClassNode node;
        bool time;
        int transition;
    };
    auto successors = [&](const ClassNode& n) {
        std::vector<Succ> out;
        for (int tid : m.outgoing[static_cast<std::size_t>(n.state)]) {
            if (auto s = discrete_successor(a, n, tid)) out.push_back({std::move(*s), false, tid});
        }
        if (m.policy_of(n.state) != Policy::Urgent) {
            ClassNode post = time_successor(a, n);
            if (!(post == n)) out.push_back({std::move(post), true, -1});
        }
        return out;
    };

    g.initial = intern(initial_class(a));
    std::deque<int> frontier{g.initial};
    while (!frontier.empty()) {
        std::vector<int> layer(frontier.begin(), frontier.end());
        frontier.clear();
        std::vector<std::vector<Succ>> layer_succs(layer.size());
        if (opts.jobs > 1 && layer.size() > 1) {
            std::vector<std::future<std::vector<Succ>>> futs;
            futs.reserve(layer.size());
            for (int id : layer) {
                ClassNode n = g.nodes[static_cast<std::size_t>(id)];
                futs.push_back(std::async(std::launch::async, [&successors, n] { return successors(n); }));
            }
            for (std::size_t i = 0; i < futs.size(); ++i) layer_succs[i] = futs[i].get();
        } else {
            for (std::size_t i = 0; i < layer.size(); ++i)
                layer_succs[i] = successors(g.nodes[static_cast<std::size_t>(layer[i])]);
        }
        for (std::size_t i = 0; i < layer.size(); ++i) {
            int src = layer[i];
            int src_state = g.nodes[static_cast<std::size_t>(src)].state;
            bool has_time = false;
            for (const Succ& s : layer_succs[i]) {
                bool existed = ids.count(s.node) > 0;
                int dst = intern(s.node);  // may grow g.nodes
                g.out[static_cast<std::size_t>(src)].push_back(static_cast<int>(g.edges.size()));
                g.edges.push_back({src, dst, s.time, s.transition});
                if (s.time) has_time = true;
                if (!existed) frontier.push_back(dst);
            }
            if (!has_time && m.policy_of(src_state) != Policy::Urgent)
                g.divergent[static_cast<std::size_t>(src)] = true;
        }
    }
    return g;
}

struct ReachAnswer {
    bool reachable = false;
    std::vector<int> path_edges;  // edge ids along a shortest abstract path
};

/// Decides state reachability on the class graph (exact for ITA).
inline ReachAnswer reachable(const Analysis& a, const ClassGraph& g,
                             const std::function<bool(const StateDecl&)>& target) {
    std::vector<int> parent_edge(g.nodes.size(), -2);
    std::deque<int> q{g.initial};
    parent_edge[static_cast<std::size_t>(g.initial)] = -1;
    auto matches = [&](int node) {
        return target(a.model.states[static_cast<std::size_t>(g.nodes[static_cast<std::size_t>(node)].state)]);
    };
    int found = matches(g.initial) ? g.initial : -1;
    while (found < 0 && !q.empty()) {
        int cur = q.front();
        q.pop_front();
        for (int e : g.out[static_cast<std::size_t>(cur)]) {
            int dst = g.edges[static_cast<std::size_t>(e)].dst;
            if (parent_edge[static_cast<std::size_t>(dst)] != -2) continue;
            parent_edge[static_cast<std::size_t>(dst)] = e;
            if (matches(dst)) {
                found = dst;
                break;
            }
            q.push_back(dst);
        }
    }
    if (found < 0) return {};
    ReachAnswer ans;
    ans.reachable = true;
    for (int cur = found; parent_edge[static_cast<std::size_t>(cur)] >= 0;) {
        int e = parent_edge[static_cast<std::size_t>(cur)];
        ans.path_edges.push_back(e);
        cur = g.edges[static_cast<std::size_t>(e)].src;
    }
    std::reverse(ans.path_edges.begin(), ans.path_edges.end());
    return ans;
}

inline ReachAnswer reachable(const Analysis& a, const ClassGraph& g, const std::string& state_name) {
    return reachable(a, g, [&](const StateDecl& s) { return s.name == state_name; });
}

}  // namespace ita

#endif  // ITA_CLASSGRAPH_HPP
