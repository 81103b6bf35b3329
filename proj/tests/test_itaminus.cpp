#include "ita/itaminus.hpp"

#include "ita/parser.hpp"
#include "test_support.hpp"

#include "doctest.h"

#include <algorithm>
#include <random>

using namespace ita;

namespace {

const LinExpr x1 = LinExpr::clock(1);
const LinExpr x2 = LinExpr::clock(2);

std::set<LinExpr> as_set(const std::vector<LinExpr>& v) { return {v.begin(), v.end()}; }

/// BFS-canonical signature for comparing automata modulo state naming.
std::string signature(const ITAModel& m) {
    std::vector<int> order(m.states.size(), -1);
    int next = 0;
    std::deque<int> work{m.initial};
    order[static_cast<std::size_t>(m.initial)] = next++;
    while (!work.empty()) {
        int cur = work.front();
        work.pop_front();
        for (int tid : m.outgoing[static_cast<std::size_t>(cur)]) {
            int dst = m.transitions[static_cast<std::size_t>(tid)].target;
            if (order[static_cast<std::size_t>(dst)] < 0) {
                order[static_cast<std::size_t>(dst)] = next++;
                work.push_back(dst);
            }
        }
    }
    std::vector<std::string> lines;
    for (const auto& t : m.transitions) {
        int s = order[static_cast<std::size_t>(t.source)];
        int d = order[static_cast<std::size_t>(t.target)];
        if (s < 0 || d < 0) continue;  // unreachable
        std::string g;
        for (const auto& atom : t.guard) g += atom.expr.str() + comparator_str(atom.op) + ";";
        std::string u;
        for (const auto& [c, e] : t.update.assignments())
            u += "x" + std::to_string(c) + ":=" + e.str() + ";";
        lines.push_back(std::to_string(s) + "|" + std::to_string(d) + "|" + t.action + "|" + g +
                        "|" + u);
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

/// Multiplies every additive constant (guards and update expressions) by k.
ITAModel scale_constants(const ITAModel& m, const Rational& k) {
    ITAModel out = m;
    for (auto& t : out.transitions) {
        for (auto& atom : t.guard) atom.expr.add_constant(atom.expr.constant() * k - atom.expr.constant());
        Update scaled;
        for (const auto& [c, e] : t.update.assignments()) {
            LinExpr se = e;
            se.add_constant(se.constant() * k - se.constant());
            scaled.set(c, se);
        }
        t.update = scaled;
    }
    out.finalize();
    return out;
}

}  // namespace

TEST_CASE("F sets of a2") {
    ITAModel m = test_support::load("a2.ita");
    FSets fs = build_F_sets(m);
    CHECK(as_set(fs.at(1, 1)) == std::set<LinExpr>{x1});
    CHECK(as_set(fs.at(2, 1)) == std::set<LinExpr>{x1, LinExpr(2)});
    CHECK(as_set(fs.at(2, 2)) == std::set<LinExpr>{x2});
    CHECK(as_set(fs.at(3, 1)) == std::set<LinExpr>{x1, LinExpr(2), LinExpr(1)});
    CHECK(as_set(fs.at(3, 2)) ==
          std::set<LinExpr>{x2, Rational(2) * x1 + LinExpr(1), LinExpr(5), LinExpr(3),
                            x1 + LinExpr(1), LinExpr(2)});
    CHECK(as_set(fs.at(3, 3)) == std::set<LinExpr>{LinExpr::clock(3)});
    CHECK(as_set(fs.aggregate(2)) == as_set(fs.at(3, 2)));
}

TEST_CASE("update-free models have trivial F sets") {
    ITAModel m = parse_ita(R"(ita p { clocks 3;
      state a level 1 policy lazy initial;
      state b level 2 policy lazy;
      state c level 3 policy lazy final;
      trans a -> b on u when x1 < 1;
      trans b -> c on v when x2 < 1;
    })");
    FSets fs = build_F_sets(m);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= i; ++j) CHECK(as_set(fs.at(i, j)) == std::set<LinExpr>{LinExpr::clock(j)});
}

TEST_CASE("to_ita_minus(a2): memorized branches, urgent minus states") {
    ITAModel m = test_support::load("a2.ita");
    ItaMinusResult r = to_ita_minus(m);
    CHECK(r.model.validate().empty());
    CHECK(r.model.is_ita_minus().first);
    CHECK(r.model.states.size() == 12);
    CHECK(r.model.transitions.size() == 12);

    // urgent minus state whose ε-transition restores x2 := 5
    int minus5 = -1;
    for (std::size_t i = 0; i < r.model.states.size(); ++i) {
        if (!r.minus_polarity[i]) continue;
        CHECK(r.model.states[i].policy == Policy::Urgent);
        for (int tid : r.model.outgoing[i]) {
            const TransitionDecl& t = r.model.transitions[static_cast<std::size_t>(tid)];
            CHECK(t.action.empty());
            CHECK(t.guard.empty());
            const LinExpr* restored = t.update.expr_for(2);
            REQUIRE(restored != nullptr);
            if (*restored == LinExpr(5)) minus5 = static_cast<int>(i);
        }
    }
    CHECK(minus5 >= 0);

    // the q2 -> q3 guard in the x1 := 2 branch becomes 2x2 + 2 > 3
    bool rewritten = false;
    for (const auto& t : r.model.transitions) {
        for (const auto& atom : t.guard) {
            if (atom.expr == Rational(2) * x2 - LinExpr(1) && atom.op == Comparator::GT)
                rewritten = true;
        }
    }
    CHECK(rewritten);

    // finals are plus copies of finals only
    for (std::size_t i = 0; i < r.model.states.size(); ++i) {
        if (r.model.states[i].is_final) CHECK(!r.minus_polarity[i]);
    }
}

TEST_CASE("count_expanded") {
    ITAModel m = test_support::load("a2.ita");
    auto [states, transitions] = count_expanded(m);
    CHECK(states == 12);
    CHECK(transitions == 12);
}

TEST_CASE("ITA- input maps to an isomorphic automaton") {
    for (const char* name : {"a1.ita", "a4.ita", "a1_strengthened.ita"}) {
        ITAModel m = test_support::load(name);
        REQUIRE(m.is_ita_minus().first);
        ItaMinusResult r = to_ita_minus(m);
        CHECK(r.model.states.size() == m.states.size());
        CHECK(r.model.transitions.size() == m.transitions.size());
        CHECK(signature(r.model) == signature(m));
    }
}

TEST_CASE("decreasing edges through identity restorations are collapsed") {
    ITAModel m = parse_ita(R"(ita c { clocks 2;
      state lo level 1 policy lazy initial;
      state hi level 2 policy lazy;
      state back level 1 policy lazy final;
      trans lo -> hi on u when x1 < 1;
      trans hi -> back on d when x2 > 1 do x2 := 0;
    })");
    REQUIRE(m.validate().empty());
    REQUIRE(m.is_ita_minus().first);
    ItaMinusResult r = to_ita_minus(m);
    for (bool minus : r.minus_polarity) CHECK(!minus);
    CHECK(r.model.states.size() == 3);
}

TEST_CASE("prime-update family at n=3 expands to at least 2^3 states") {
    ITAModel m;
    m.name = "primes3";
    m.clock_count = 3;
    m.states.push_back({"init", 3, Policy::Lazy, {}, true, false});
    m.states.push_back({"q", 3, Policy::Lazy, {}, false, true});
    TransitionDecl start;
    start.source = 0;
    start.target = 1;
    start.action = "s";
    start.update.set(1, LinExpr(1));
    start.update.set(2, LinExpr(1));
    start.update.set(3, LinExpr(1));
    m.transitions.push_back(start);
    const long primes[] = {2, 3, 5};
    for (int k = 1; k <= 3; ++k) {
        TransitionDecl keep;
        keep.source = keep.target = 1;
        keep.action = "k" + std::to_string(k);
        keep.update.set(k, k == 1 ? LinExpr(1) : LinExpr::clock(k - 1));
        m.transitions.push_back(keep);
        TransitionDecl mul;
        mul.source = mul.target = 1;
        mul.action = "m" + std::to_string(k);
        mul.update.set(k, k == 1 ? LinExpr(primes[0])
                                 : Rational(primes[k - 1]) * LinExpr::clock(k - 1));
        m.transitions.push_back(mul);
    }
    m.finalize();
    REQUIRE(m.validate().empty());
    auto [states, transitions] = count_expanded(m);
    CHECK(states >= 8);
    CHECK(transitions > states);
}

TEST_CASE("run mapping between the automaton and its expansion") {
    ITAModel m = test_support::load("a2.ita");
    ItaMinusResult r = to_ita_minus(m);
    for (const Run& run : random_runs(m, 30, 8, 7)) {
        Run lifted = map_run_to_expanded(r, run);
        ReplayResult orig = replay(m, run);
        ReplayResult expd = replay(r.model, lifted);
        CHECK(orig.word == expd.word);
        CHECK(orig.total_time == expd.total_time);
        CHECK(r.base_state[static_cast<std::size_t>(expd.final.state)] == orig.final.state);
        Run back = map_run_from_expanded(r, lifted);
        CHECK(replay(m, back).word == orig.word);
    }
}

TEST_CASE("language agreement: acceptance transfers both ways") {
    ITAModel m = test_support::load("a2.ita");
    ItaMinusResult r = to_ita_minus(m);
    std::mt19937_64 rng(31);
    int accepted = 0;
    for (const Run& run : random_runs(m, 60, 8, 13)) {
        ReplayResult rr = replay(m, run);
        TimedWord word = rr.word;
        bool orig_accepts = accepts(m, word, run);
        Run lifted = map_run_to_expanded(r, run);
        CHECK(accepts(r.model, word, lifted) == orig_accepts);
        if (orig_accepts) ++accepted;
        // perturbed words are rejected consistently on both sides
        if (!word.empty()) {
            TimedWord bad = word;
            bad.back().second += Rational(1 + static_cast<long>(rng() % 5), 7);
            CHECK(!accepts(m, bad, run));
            CHECK(!accepts(r.model, bad, lifted));
        }
    }
    CHECK(accepted > 0);
}

TEST_CASE("scaling constants commutes with the transformation") {
    ITAModel m = parse_ita(R"(ita rat { clocks 2;
      state s level 1 policy lazy initial;
      state h level 2 policy lazy;
      state f level 1 policy lazy final;
      trans s -> h on a when x1 < 1/2 do x1 := 1/3;
      trans h -> f on b when x2 + x1 = 3/4 do x1 := 1/6, x2 := 0;
    })");
    REQUIRE(m.validate().empty());
    // lcm of denominators {2,3,4,6} = 12
    Rational delta(12);
    ITAModel scaled = scale_constants(m, delta);
    ItaMinusResult direct = to_ita_minus(m);
    ItaMinusResult via = to_ita_minus(scaled);
    ITAModel unscaled = scale_constants(via.model, delta.inverse());
    CHECK(signature(unscaled) == signature(direct.model));
}
