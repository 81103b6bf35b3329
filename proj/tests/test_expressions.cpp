#include "ita/expressions.hpp"

#include "ita/parser.hpp"
#include "test_support.hpp"

#include "doctest.h"

#include <set>

using namespace ita;

namespace {

std::set<LinExpr> as_set(const ExpressionSets& es, int level) {
    const auto& v = es.at(level);
    return std::set<LinExpr>(v.begin(), v.end());
}

const LinExpr x1 = LinExpr::clock(1);
const LinExpr x2 = LinExpr::clock(2);

}  // namespace

TEST_CASE("a1 expression sets") {
    ITAModel m = test_support::load("a1.ita");
    ExpressionSets es = build_expression_sets(m);
    CHECK(as_set(es, 1) == std::set<LinExpr>{x1, LinExpr(0), LinExpr(1), LinExpr(2)});
    CHECK(as_set(es, 2) == std::set<LinExpr>{x2, LinExpr(0), Rational(-1, 2) * x1 + LinExpr(1)});
}

TEST_CASE("guard-free single-level model keeps only the seeds") {
    ITAModel m = parse_ita("ita s { clocks 1; state q level 1 policy lazy initial; }");
    ExpressionSets es = build_expression_sets(m);
    CHECK(as_set(es, 1) == std::set<LinExpr>{LinExpr::clock(1), LinExpr(0)});
}

TEST_CASE("reset closure injects the guard complement difference downward") {
    // treating level 2 adds -1/2 x1 + 1 to E_2, then the a-transition's reset
    // x2 := 0 sends the difference down as the constant 2
    ITAModel m = test_support::load("a1.ita");
    ExpressionSets es = build_expression_sets(m);
    int idx = es.index_of(1, LinExpr(2));
    REQUIRE(idx >= 0);
    CHECK(es.tag(1, idx) == ExprTag::LevelDifference);
    int one = es.index_of(1, LinExpr(1));
    REQUIRE(one >= 0);
    CHECK(es.tag(1, one) == ExprTag::Guard);
}

TEST_CASE("extended sets for the phi1 comparison") {
    ITAModel m = test_support::load("a1.ita");
    ExpressionSets es = build_expression_sets_with_formula(m, {x2 - x1});
    CHECK(as_set(es, 1) == std::set<LinExpr>{x1, LinExpr(0), LinExpr(1), LinExpr(Rational(2, 3)),
                                             LinExpr(2)});
    CHECK(as_set(es, 2) ==
          std::set<LinExpr>{x2, LinExpr(0), Rational(-1, 2) * x1 + LinExpr(1), x1});
}

TEST_CASE("empty comparison list is the plain construction") {
    ITAModel m = test_support::load("a1.ita");
    ExpressionSets plain = build_expression_sets(m);
    ExpressionSets ext = build_expression_sets_with_formula(m, {});
    for (int k = 1; k <= 2; ++k) CHECK(as_set(plain, k) == as_set(ext, k));
}

TEST_CASE("a comparison duplicating the top-level guard adds nothing") {
    ITAModel m = test_support::load("a1.ita");
    ExpressionSets plain = build_expression_sets(m);
    ExpressionSets ext =
        build_expression_sets_with_formula(m, {x1 + Rational(2) * x2 - LinExpr(2)});
    for (int k = 1; k <= 2; ++k) CHECK(as_set(plain, k) == as_set(ext, k));

    // a comparison matching a lower-level guard still seeds its projection at
    // the levels above (the labeling needs it there)
    ExpressionSets ext2 = build_expression_sets_with_formula(m, {x1 - LinExpr(1)});
    CHECK(as_set(ext2, 1) == as_set(plain, 1));
    std::set<LinExpr> expected2 = as_set(plain, 2);
    expected2.insert(-x1 + LinExpr(1));
    CHECK(as_set(ext2, 2) == expected2);
}

TEST_CASE("fixpoint: rerunning the closure on the output adds nothing") {
    for (const char* name : {"a1.ita", "a2.ita", "a4.ita"}) {
        ITAModel m = normalize_guards(test_support::load(name));
        ExpressionSets es = build_expression_sets(m);
        ExpressionBuildOptions opts;
        // rule 1
        for (int k = 1; k <= m.clock_count; ++k) {
            for (const auto& tr : m.transitions) {
                if (m.level_of(tr.source) < k || m.level_of(tr.target) < k) continue;
                for (const LinExpr& c : es.at(k))
                    CHECK(es.index_of(k, substitute(c, tr.update)) >= 0);
            }
            // rule 2: every pair's difference complement is present at the source level
            for (const auto& tr : m.transitions) {
                int lq = m.level_of(tr.source);
                if (lq >= k || m.level_of(tr.target) < k) continue;
                const auto& ek = es.at(k);
                for (std::size_t i = 0; i < ek.size(); ++i) {
                    for (std::size_t j = i + 1; j < ek.size(); ++j) {
                        LinExpr d = substitute(ek[i], tr.update) - substitute(ek[j], tr.update);
                        NormalizedExpr nd = normalize(d, lq);
                        LinExpr complement = nd.expr;
                        Rational alpha = complement.coeff(lq);
                        if (!alpha.is_zero()) complement.add_term(lq, -alpha);
                        CHECK(es.index_of(lq, -complement) >= 0);
                    }
                }
            }
        }
        (void)opts;
    }
}

TEST_CASE("determinism: identical ordered sets across runs") {
    ITAModel m = test_support::load("a2.ita");
    ExpressionSets a = build_expression_sets(m);
    ExpressionSets b = build_expression_sets(m);
    for (int k = 1; k <= m.clock_count; ++k) {
        REQUIRE(a.at(k).size() == b.at(k).size());
        for (std::size_t i = 0; i < a.at(k).size(); ++i) CHECK(a.at(k)[i] == b.at(k)[i]);
    }
}

TEST_CASE("every guard complement of a level-k transition appears in E_k") {
    for (const char* name : {"a1.ita", "a2.ita", "a4.ita", "a1_strengthened.ita"}) {
        ITAModel m = normalize_guards(test_support::load(name));
        ExpressionSets es = build_expression_sets(m);
        for (const auto& tr : m.transitions) {
            int k = m.level_of(tr.source);
            for (const auto& atom : tr.guard) {
                LinExpr rest = atom.expr;
                Rational alpha = rest.coeff(k);
                if (!alpha.is_zero()) rest.add_term(k, -alpha);
                CHECK(es.index_of(k, -rest) >= 0);
            }
        }
    }
}

TEST_CASE("invariants: seeds present, levels respected, x_k coefficient canonical") {
    for (const char* name : {"a1.ita", "a2.ita", "a4.ita"}) {
        ITAModel m = test_support::load(name);
        ExpressionSets es = build_expression_sets(m);
        for (int k = 1; k <= m.clock_count; ++k) {
            CHECK(es.clock_index(k) == 0);
            CHECK(es.zero_index(k) == 1);
            for (const LinExpr& e : es.at(k)) {
                CHECK(e.max_clock() <= k);
                Rational a = e.coeff(k);
                CHECK((a.is_zero() || a == Rational(1)));
            }
        }
    }
}

TEST_CASE("expression cap reports the level") {
    ITAModel m = test_support::load("a2.ita");
    ExpressionBuildOptions opts;
    opts.max_exprs_per_level = 2;
    CHECK_THROWS_AS(build_expression_sets(m, opts), cap_error);
}
