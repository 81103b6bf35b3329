#include "ita/linexpr.hpp"

#include "doctest.h"

#include <random>

using namespace ita;

namespace {

Rational random_rational(std::mt19937_64& rng, int num_range = 20, int max_den = 8) {
    std::uniform_int_distribution<long> num(-num_range, num_range);
    std::uniform_int_distribution<long> den(1, max_den);
    return Rational(num(rng), den(rng));
}

LinExpr random_expr(std::mt19937_64& rng, int clocks) {
    LinExpr e(random_rational(rng));
    std::uniform_int_distribution<int> coin(0, 1);
    for (int c = 1; c <= clocks; ++c)
        if (coin(rng)) e.add_term(c, random_rational(rng));
    return e;
}

Valuation random_valuation(std::mt19937_64& rng, int clocks) {
    Valuation v(clocks);
    for (int c = 1; c <= clocks; ++c) v[c] = random_rational(rng, 10, 6);
    return v;
}

Update random_update(std::mt19937_64& rng, int clocks) {
    Update u;
    std::uniform_int_distribution<int> mode(0, 2);
    for (int c = 1; c <= clocks; ++c) {
        switch (mode(rng)) {
            case 0: break;  // identity
            case 1: u.set(c, LinExpr(random_rational(rng))); break;
            default: u.set(c, random_expr(rng, clocks)); break;
        }
    }
    return u;
}

}  // namespace

TEST_CASE("rational basics") {
    CHECK(Rational(4, 8) == Rational(1, 2));
    CHECK(Rational(3, -2) == Rational(-3, 2));
    CHECK(Rational(-3, 2).denominator() == 2);
    CHECK(Rational(0, 5).str() == "0");
    CHECK(Rational::parse("7/10").str() == "7/10");
    CHECK(Rational::parse("1.5") == Rational(3, 2));
    CHECK(Rational::parse("-0.25") == Rational(-1, 4));
    CHECK(Rational::parse("2") == Rational(2));
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK_THROWS(Rational::parse("x"));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) * Rational(3) == Rational(1));
    CHECK(Rational(1, 2).inverse() == Rational(2));
    CHECK_THROWS(Rational(0).inverse());
}

TEST_CASE("rational arithmetic is exact") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        Rational a = random_rational(rng, 1000, 97);
        Rational b = random_rational(rng, 1000, 97);
        CHECK((a + b) - b == a);
        if (!b.is_zero()) CHECK((a / b) * b == a);
    }
}

TEST_CASE("linexpr canonical form") {
    LinExpr e = LinExpr::clock(1) + LinExpr::clock(2) - LinExpr::clock(1);
    CHECK(e.coeff(1).is_zero());
    CHECK(e.terms().size() == 1);
    CHECK(e == LinExpr::clock(2));
    CHECK((e - e).is_zero());
    CHECK(LinExpr(0).str() == "0");
    LinExpr r = Rational(-1, 2) * LinExpr::clock(1) + LinExpr(1);
    CHECK(r.str() == "-1/2*x1 + 1");
    CHECK((LinExpr::clock(2) - Rational(2) * LinExpr::clock(1) + LinExpr(3)).str() ==
          "-2*x1 + x2 + 3");
}

TEST_CASE("substitute") {
    // C = x2 - 2x1 + 3 under x1 := 1, x2 := 2x1 + 1 gives 2x1 + 2
    LinExpr c = LinExpr::clock(2) - Rational(2) * LinExpr::clock(1) + LinExpr(3);
    Update u;
    u.set(1, LinExpr(1));
    u.set(2, Rational(2) * LinExpr::clock(1) + LinExpr(1));
    CHECK(substitute(c, u) == Rational(2) * LinExpr::clock(1) + LinExpr(2));

    Update identity;
    CHECK(substitute(c, identity) == c);

    Update single;
    single.set(3, Rational(3) * LinExpr::clock(2) - LinExpr::clock(1));
    CHECK(substitute(LinExpr::clock(3), single) ==
          Rational(3) * LinExpr::clock(2) - LinExpr::clock(1));
}

TEST_CASE("evaluate") {
    LinExpr c = LinExpr::clock(2) - Rational(2) * LinExpr::clock(1) + LinExpr(3);
    Valuation v{Rational(2), Rational(3, 2), Rational(3)};
    CHECK(c.evaluate(v) == Rational(1, 2));
    CHECK(LinExpr(Rational(5, 3)).evaluate(v) == Rational(5, 3));
    CHECK((Rational(2) * LinExpr::clock(1) + LinExpr(2)).evaluate(v) == Rational(6));
}

TEST_CASE("apply_update: simultaneous against the pre-update valuation") {
    Valuation v{Rational(2), Rational(3, 2), Rational(3)};
    Update u;
    u.set(1, LinExpr(1));
    u.set(3, Rational(3) * LinExpr::clock(2) - LinExpr::clock(1));
    Valuation out = apply_update(v, u);
    CHECK(out == Valuation{Rational(1), Rational(3, 2), Rational(5, 2)});

    Update identity;
    CHECK(apply_update(v, identity) == v);

    Valuation zero{Rational(0), Rational(0)};
    Update reset;
    reset.set(2, LinExpr(0));
    CHECK(apply_update(zero, reset) == zero);
}

TEST_CASE("normalize: definition cases") {
    Rational half(1, 2);
    auto n1 = normalize(LinExpr::clock(1) + Rational(2) * LinExpr::clock(2) - LinExpr(2), 2);
    CHECK(n1.expr == LinExpr::clock(2) + half * LinExpr::clock(1) - LinExpr(1));
    CHECK(!n1.flipped);

    auto n2 = normalize(LinExpr::clock(1) - LinExpr(1), 2);
    CHECK(n2.expr == LinExpr::clock(1) - LinExpr(1));
    CHECK(!n2.flipped);

    auto n3 = normalize(Rational(-2) * LinExpr::clock(2) + LinExpr::clock(1), 2);
    CHECK(n3.expr == LinExpr::clock(2) - half * LinExpr::clock(1));
    CHECK(n3.flipped);

    CHECK_THROWS_AS(normalize(LinExpr::clock(3), 2), std::invalid_argument);
}

TEST_CASE("property: v(C[u]) = v[u](C)") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 300; ++i) {
        int clocks = 1 + static_cast<int>(rng() % 4);
        LinExpr c = random_expr(rng, clocks);
        Update u = random_update(rng, clocks);
        Valuation v = random_valuation(rng, clocks);
        CHECK(substitute(c, u).evaluate(v) == c.evaluate(apply_update(v, u)));
    }
}

TEST_CASE("property: normalization preserves satisfaction with comparator flip") {
    std::mt19937_64 rng(43);
    const Comparator ops[] = {Comparator::LT, Comparator::LE, Comparator::EQ, Comparator::GE,
                              Comparator::GT};
    int flipped_seen = 0;
    for (int i = 0; i < 300; ++i) {
        int clocks = 1 + static_cast<int>(rng() % 3);
        int level = clocks;
        LinExpr c = random_expr(rng, clocks);
        if (c.coeff(level).is_zero()) c.add_term(level, Rational(1 + static_cast<long>(rng() % 3)) *
                                                            Rational(rng() % 2 ? 1 : -1));
        Valuation v = random_valuation(rng, clocks);
        Comparator op = ops[rng() % 5];
        NormalizedExpr n = normalize(c, level);
        if (n.flipped) ++flipped_seen;
        Comparator eff = n.flipped ? reverse(op) : op;
        bool before = comparator_holds(c.evaluate(v).sign(), op);
        bool after = comparator_holds(n.expr.evaluate(v).sign(), eff);
        CHECK(before == after);
    }
    CHECK(flipped_seen > 0);
}

TEST_CASE("property: apply_update is order-independent") {
    // the assignment map is keyed by clock; building it in any order gives the
    // same update, and application is simultaneous
    std::mt19937_64 rng(44);
    for (int i = 0; i < 100; ++i) {
        int clocks = 2 + static_cast<int>(rng() % 3);
        std::vector<std::pair<int, LinExpr>> assigns;
        for (int c = 1; c <= clocks; ++c)
            if (rng() % 2) assigns.emplace_back(c, random_expr(rng, clocks));
        Update forward, backward;
        for (const auto& [c, e] : assigns) forward.set(c, e);
        for (auto it = assigns.rbegin(); it != assigns.rend(); ++it) backward.set(it->first, it->second);
        CHECK(forward == backward);
        Valuation v = random_valuation(rng, clocks);
        CHECK(apply_update(v, forward) == apply_update(v, backward));
    }
}
