#ifndef ITA_EMIT_HPP
#define ITA_EMIT_HPP

#include "ita/classgraph.hpp"

#include "json.hpp"

#include <deque>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace ita {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

/// Label with DOT-escaped segments joined by literal \n line breaks.
inline std::string node_label(const Analysis& a, const ClassNode& n) {
    std::string label = dot_escape(a.model.state_name(n.state));
    if (n.tag != ClassTag::Open) label += n.tag == ClassTag::Minus ? " [-]" : " [+]";
    for (std::size_t k = 0; k < n.pre.size(); ++k)
        label += "\\n" + dot_escape(n.pre[k].render(a.esets, static_cast<int>(k) + 1));
    return label;
}

}  // namespace detail

/// Deterministic DOT rendering; time edges dashed, accepting nodes doubled.
inline std::string to_dot(const Analysis& a, const ClassGraph& g) {
    std::set<int> accepting(g.accepting.begin(), g.accepting.end());
    std::string out = "digraph classes {\n  rankdir=TB;\n  node [shape=box, style=rounded];\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        out += "  n" + std::to_string(i) + " [label=\"" + detail::node_label(a, g.nodes[i]) + "\"";
        if (accepting.count(static_cast<int>(i))) out += ", peripheries=2";
        if (static_cast<int>(i) == g.initial) out += ", penwidth=2";
        out += "];\n";
    }
    for (const ClassEdge& e : g.edges) {
        out += "  n" + std::to_string(e.src) + " -> n" + std::to_string(e.dst);
        if (e.time) {
            out += " [style=dashed]";
        } else {
            const std::string& act = a.model.transitions[static_cast<std::size_t>(e.transition)].action;
            out += " [label=\"" + detail::dot_escape(act.empty() ? "eps" : act) + "\"]";
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

inline Json to_json(const Analysis& a, const ClassGraph& g) {
    Json j;
    j["schema"] = 1;
    j["model"] = a.model.name;
    j["initial"] = g.initial;
    Json nodes = Json::array();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const ClassNode& n = g.nodes[i];
        Json jn;
        jn["id"] = i;
        jn["state"] = a.model.state_name(n.state);
        jn["tag"] = class_tag_str(n.tag);
        Json pres = Json::array();
        for (const Preorder& p : n.pre) {
            Json blocks = Json::array();
            for (const auto& b : p.blocks()) blocks.push_back(b);
            pres.push_back(blocks);
        }
        jn["preorders"] = pres;
        jn["divergent"] = static_cast<bool>(g.divergent[i]);
        nodes.push_back(jn);
    }
    j["nodes"] = nodes;
    Json edges = Json::array();
    for (const ClassEdge& e : g.edges) {
        Json je;
        je["src"] = e.src;
        je["dst"] = e.dst;
        je["kind"] = e.time ? "time" : "discrete";
        if (!e.time) je["transition"] = e.transition;
        edges.push_back(je);
    }
    j["edges"] = edges;
    j["accepting"] = g.accepting;
    return j;
}

/// Finite automaton over the model's alphabet; empty label = epsilon.
struct FiniteAutomaton {
    int states = 0;
    int initial = 0;
    std::vector<int> finals;
    struct Edge {
        int src, dst;
        std::string label;
    };
    std::vector<Edge> edges;

    bool accepts(const std::vector<std::string>& word) const {
        std::set<int> cur = closure({initial});
        for (const std::string& a : word) {
            std::set<int> next;
            for (const Edge& e : edges)
                if (!e.label.empty() && e.label == a && cur.count(e.src)) next.insert(e.dst);
            cur = closure(next);
            if (cur.empty()) return false;
        }
        for (int f : finals)
            if (cur.count(f)) return true;
        return false;
    }

    /// All accepted words of length <= maxlen (alphabet taken from the edges).
    std::vector<std::vector<std::string>> enumerate_words(std::size_t maxlen) const {
        std::set<std::string> sigma;
        for (const Edge& e : edges)
            if (!e.label.empty()) sigma.insert(e.label);
        std::vector<std::vector<std::string>> out;
        std::vector<std::string> word;
        std::function<void()> rec = [&] {
            if (accepts(word)) out.push_back(word);
            if (word.size() == maxlen) return;
            for (const std::string& a : sigma) {
                word.push_back(a);
                rec();
                word.pop_back();
            }
        };
        rec();
        return out;
    }

    /// Standard epsilon-elimination; the result has no empty labels.
    FiniteAutomaton eliminate_epsilon() const {
        FiniteAutomaton out;
        out.states = states;
        out.initial = initial;
        std::set<int> final_set(finals.begin(), finals.end());
        std::set<std::tuple<int, std::string, int>> seen;
        for (int s = 0; s < states; ++s) {
            std::set<int> cl = closure({s});
            bool is_final = false;
            for (int c : cl)
                if (final_set.count(c)) is_final = true;
            if (is_final) out.finals.push_back(s);
            for (int c : cl) {
                for (const Edge& e : edges) {
                    if (e.src != c || e.label.empty()) continue;
                    if (seen.insert({s, e.label, e.dst}).second)
                        out.edges.push_back({s, e.dst, e.label});
                }
            }
        }
        return out;
    }

private:
    std::set<int> closure(std::set<int> set) const {
        std::deque<int> work(set.begin(), set.end());
        while (!work.empty()) {
            int s = work.front();
            work.pop_front();
            for (const Edge& e : edges) {
                if (e.src == s && e.label.empty() && !set.count(e.dst)) {
                    set.insert(e.dst);
                    work.push_back(e.dst);
                }
            }
        }
        return set;
    }
};

/// Relabels the class graph: discrete edges keep their letter, time edges
/// become epsilon. The untimed language of the ITA is the language of this
/// automaton (regularity construction).
inline FiniteAutomaton untimed_automaton(const Analysis& a, const ClassGraph& g) {
    FiniteAutomaton fa;
    fa.states = static_cast<int>(g.nodes.size());
    fa.initial = g.initial;
    fa.finals = g.accepting;
    for (const ClassEdge& e : g.edges) {
        std::string label;
        if (!e.time) label = a.model.transitions[static_cast<std::size_t>(e.transition)].action;
        fa.edges.push_back({e.src, e.dst, label});
    }
    return fa;
}

inline Json to_json(const FiniteAutomaton& fa) {
    Json j;
    j["schema"] = 1;
    j["states"] = fa.states;
    j["initial"] = fa.initial;
    j["finals"] = fa.finals;
    Json edges = Json::array();
    for (const auto& e : fa.edges) {
        Json je;
        je["src"] = e.src;
        je["dst"] = e.dst;
        je["label"] = e.label.empty() ? "eps" : e.label;
        edges.push_back(je);
    }
    j["edges"] = edges;
    return j;
}

}  // namespace ita

#endif  // ITA_EMIT_HPP
