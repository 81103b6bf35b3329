#include "ita/semantics.hpp"

#include "ita/parser.hpp"
#include "test_support.hpp"

#include "doctest.h"

#include <random>

using namespace ita;

namespace {

ITAModel a1() { return test_support::load("a1.ita"); }

/// L1 = {(a,t)(b, 1 + t/2) | 0 <= t < 1}, with the canonical witness run.
Run l1_witness(const Rational& tau) {
    return {RunStep::time(tau), RunStep::fire(0), RunStep::time(Rational(1) - tau / Rational(2)),
            RunStep::fire(1)};
}

TimedWord l1_word(const Rational& tau) {
    return {{"a", tau}, {"b", Rational(1) + tau / Rational(2)}};
}

}  // namespace

TEST_CASE("time_step") {
    ITAModel m = a1();
    Configuration c = initial_configuration(m);
    Configuration c2 = time_step(m, c, Rational(7, 10));
    CHECK(c2.v[1] == Rational(7, 10));
    CHECK(c2.v[2] == Rational(0));
    CHECK(c2.beta);
    CHECK(time_step(m, c, Rational(0)) == c);
    CHECK_THROWS_AS(time_step(m, c, Rational(-1)), semantics_error);

    ITAModel u = parse_ita(R"(ita u { clocks 1; state s level 1 policy urgent initial; })");
    Configuration cu = initial_configuration(u);
    CHECK(time_step(u, cu, Rational(0)) == cu);
    CHECK_THROWS_AS(time_step(u, cu, Rational(1)), semantics_error);
}

TEST_CASE("only the active clock evolves") {
    ITAModel m = a1();
    Configuration c = initial_configuration(m);
    c = time_step(m, c, Rational(7, 10));
    c = discrete_step(m, c, 0);  // now at q1, level 2
    Configuration c2 = time_step(m, c, Rational(1, 2));
    CHECK(c2.v[1] == Rational(7, 10));  // frozen
    CHECK(c2.v[2] == Rational(1, 2));
}

TEST_CASE("discrete_step") {
    ITAModel m = a1();
    Configuration c = time_step(m, initial_configuration(m), Rational(7, 10));
    Configuration q1 = discrete_step(m, c, 0);
    CHECK(m.state_name(q1.state) == "q1");
    CHECK(q1.v[1] == Rational(7, 10));
    CHECK(q1.v[2] == Rational(0));
    CHECK(!q1.beta);

    Configuration mid = time_step(m, q1, Rational(13, 20));
    Configuration q2 = discrete_step(m, mid, 1);  // 7/10 + 2*13/20 = 2
    CHECK(m.state_name(q2.state) == "q2");
    CHECK(q2.v[1] == Rational(7, 10));
    CHECK(q2.v[2] == Rational(13, 20));

    Configuration late = time_step(m, initial_configuration(m), Rational(1));
    CHECK_THROWS_AS(discrete_step(m, late, 0), semantics_error);
}

TEST_CASE("delayed policy forbids immediate discrete steps") {
    ITAModel m = parse_ita(R"(ita d { clocks 1;
      state s level 1 policy delayed initial;
      state t level 1 policy lazy final;
      trans s -> t on a;
    })");
    Configuration c = initial_configuration(m);
    CHECK_THROWS_AS(discrete_step(m, c, 0), semantics_error);
    Configuration after = time_step(m, c, Rational(1, 4));
    CHECK(m.state_name(discrete_step(m, after, 0).state) == "t");
}

TEST_CASE("replay a full accepting trajectory") {
    ITAModel m = a1();
    ReplayResult r = replay(m, l1_witness(Rational(7, 10)));
    CHECK(m.state_name(r.final.state) == "q2");
    CHECK(r.final.v == Valuation{Rational(7, 10), Rational(13, 20)});
    CHECK(!r.final.beta);
    CHECK(word_str(r.word) == "(a,7/10)(b,27/20)");

    ReplayResult empty = replay(m, {});
    CHECK(empty.final == initial_configuration(m));
    CHECK(empty.word.empty());
}

TEST_CASE("replay reports the failing step index") {
    ITAModel m = parse_ita(R"(ita d { clocks 1;
      state s level 1 policy delayed initial;
      state t level 1 policy lazy final;
      trans s -> t on a;
    })");
    try {
        replay(m, {RunStep::fire(0)});
        CHECK(false);
    } catch (const semantics_error& e) {
        CHECK(e.step == 0);
    }
    try {
        replay(m, {RunStep::time(Rational(1)), RunStep::fire(0), RunStep::fire(99)});
        CHECK(false);
    } catch (const semantics_error& e) {
        CHECK(e.step == 2);
    }
}

TEST_CASE("accepts: L1 membership") {
    ITAModel m = a1();
    CHECK(accepts(m, l1_word(Rational(7, 10)), l1_witness(Rational(7, 10))));
    CHECK(!accepts(m, {{"a", Rational(7, 10)}, {"b", Rational(13, 10)}},
                   l1_witness(Rational(7, 10))));
    CHECK(!accepts(m, {}, {}));  // q0 not final
}

TEST_CASE("accepts agrees with the closed form of L1") {
    ITAModel m = a1();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        Rational tau(static_cast<long>(rng() % 40), 40 + static_cast<long>(rng() % 10));
        REQUIRE(tau < Rational(1));
        CHECK(accepts(m, l1_word(tau), l1_witness(tau)));
    }
    for (int i = 0; i < 100; ++i) {
        Rational tau(static_cast<long>(rng() % 40), 41);
        Rational off(1 + static_cast<long>(rng() % 7), 9);
        TimedWord bad = {{"a", tau}, {"b", Rational(1) + tau / Rational(2) + off}};
        // no witness can make a non-member accepted; try the canonical shape
        Run w{RunStep::time(tau), RunStep::fire(0),
              RunStep::time(Rational(1) - tau / Rational(2) + off), RunStep::fire(1)};
        CHECK(!accepts(m, bad, w));
    }
}

TEST_CASE("replay is prefix-monotone") {
    ITAModel m = a1();
    Run full = l1_witness(Rational(1, 3));
    ReplayResult whole = replay(m, full);
    Configuration c = initial_configuration(m);
    for (std::size_t i = 0; i < full.size(); ++i) {
        Run prefix(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(i));
        ReplayResult part = replay(m, prefix);
        c = part.final;
        if (i == full.size()) CHECK(c == whole.final);
    }
    CHECK(replay(m, full).final == whole.final);
}

TEST_CASE("time-step additivity") {
    ITAModel m = a1();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        Rational d1(static_cast<long>(rng() % 9), 1 + static_cast<long>(rng() % 6));
        Rational d2(static_cast<long>(rng() % 9), 1 + static_cast<long>(rng() % 6));
        Configuration c = initial_configuration(m);
        Configuration split = time_step(m, time_step(m, c, d1), d2);
        Configuration joined = time_step(m, c, d1 + d2);
        CHECK(split.v == joined.v);
        CHECK(split.state == joined.state);
    }
}

TEST_CASE("random_runs: determinism, validity, level invariant") {
    for (const char* name : {"a1.ita", "a2.ita", "a4.ita"}) {
        ITAModel m = test_support::load(name);
        auto runs = random_runs(m, 25, 8, 99);
        auto runs2 = random_runs(m, 25, 8, 99);
        REQUIRE(runs.size() == 25);
        for (std::size_t i = 0; i < runs.size(); ++i)
            CHECK(render_run(runs[i]) == render_run(runs2[i]));
        for (const Run& r : runs) {
            // replays cleanly and keeps clocks above the level at zero
            Configuration c = initial_configuration(m);
            Rational t;
            for (const RunStep& s : r) {
                c = s.kind == RunStep::Kind::Time ? time_step(m, c, s.delay)
                                                  : discrete_step(m, c, s.transition);
                for (int clock = m.level_of(c.state) + 1; clock <= m.clock_count; ++clock)
                    CHECK(c.v[clock] == Rational(0));
            }
        }
    }
}

TEST_CASE("random_runs on a single urgent state") {
    ITAModel m = parse_ita("ita u { clocks 1; state s level 1 policy urgent initial; }");
    for (const Run& r : random_runs(m, 5, 4, 1)) CHECK(r.empty());
}

TEST_CASE("run file round-trip") {
    Run r{RunStep::time(Rational(7, 10)), RunStep::fire(0), RunStep::time(Rational(13, 20)),
          RunStep::fire(1)};
    std::string text = render_run(r);
    CHECK(text == "time 7/10\nfire 0\ntime 13/20\nfire 1\n");
    Run back = parse_run(text);
    CHECK(render_run(back) == text);
    CHECK_THROWS_AS(parse_run("warp 9"), semantics_error);
}
