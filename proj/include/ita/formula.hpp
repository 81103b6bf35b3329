#ifndef ITA_FORMULA_HPP
#define ITA_FORMULA_HPP

#include "ita/model.hpp"
#include "ita/parser.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ita {

/// Shared AST for both decidable fragments. TCTL_c^int formulas use Until with
/// no bound and arbitrary nesting plus clock comparisons; TCTL_p formulas use
/// bounded Until over propositional operands with no nesting.
struct Formula {
    enum class Kind { True, False, Atom, Not, And, Or, Compare, Until };
    Kind kind = Kind::True;

    std::string atom;                      // Atom
    std::vector<std::shared_ptr<Formula>> args;

    LinExpr compare_expr;                  // Compare: expr ⋈ 0
    Comparator compare_op = Comparator::LT;

    bool universal = false;                // Until: A vs E
    bool bounded = false;                  // Until: has subscript ⋈ a
    Comparator bound_op = Comparator::GE;  // one of >, >=, <=, <
    Rational bound;

    static std::shared_ptr<Formula> make(Kind k) {
        auto f = std::make_shared<Formula>();
        f->kind = k;
        return f;
    }
};

using FormulaPtr = std::shared_ptr<Formula>;

namespace detail {

inline void classify(const Formula& f, bool& has_bounded, bool& has_unbounded, bool& has_compare,
                     int depth_in_until = 0) {
    switch (f.kind) {
        case Formula::Kind::Compare:
            has_compare = true;
            return;
        case Formula::Kind::Until:
            if (f.bounded) {
                has_bounded = true;
                if (depth_in_until > 0) throw parse_error("nested bounded until is not supported", 0, 0);
            } else {
                has_unbounded = true;
            }
            for (const auto& a : f.args) classify(*a, has_bounded, has_unbounded, has_compare,
                                                  depth_in_until + 1);
            return;
        default:
            for (const auto& a : f.args)
                classify(*a, has_bounded, has_unbounded, has_compare, depth_in_until);
            return;
    }
}

class FormulaParser {
public:
    explicit FormulaParser(const std::string& src) : lex_(src) {}

    FormulaPtr parse() {
        FormulaPtr f = parse_or();
        if (lex_.peek().kind != Tok::End)
            throw parse_error("trailing input after formula: '" + lex_.peek().text + "'",
                              lex_.peek().line, lex_.peek().col);
        return f;
    }

private:
    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (accept_sym("|")) {
            expect_sym("|");
            auto o = Formula::make(Formula::Kind::Or);
            o->args = {f, parse_and()};
            f = o;
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_unary();
        while (lex_.peek().kind == Tok::Symbol && lex_.peek().text == "&&") {
            lex_.next();
            auto a = Formula::make(Formula::Kind::And);
            a->args = {f, parse_unary()};
            f = a;
        }
        return f;
    }

    FormulaPtr parse_unary() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Symbol && t.text == "!") {
            lex_.next();
            auto n = Formula::make(Formula::Kind::Not);
            n->args = {parse_unary()};
            return n;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "E" || t.text == "A") return parse_until(lex_.next().text == "A");
            if (t.text == "EF" || t.text == "AF" || t.text == "EG" || t.text == "AG")
                return parse_shorthand(lex_.next().text);
        }
        return parse_primary();
    }

    // E φ U ψ / A φ U ψ, with optional bound U{<=a}. Operands are primaries;
    // parenthesize anything larger.
    FormulaPtr parse_until(bool universal) {
        auto u = Formula::make(Formula::Kind::Until);
        u->universal = universal;
        FormulaPtr left = parse_primary();
        Token t = lex_.next();
        if (!(t.kind == Tok::Ident && t.text == "U"))
            throw parse_error("expected 'U' in until formula", t.line, t.col);
        parse_bound(*u);
        u->args = {left, parse_primary()};
        return u;
    }

    // EF ψ = E true U ψ, AF ψ = A true U ψ, EG ψ = !AF !ψ, AG ψ = !EF !ψ.
    FormulaPtr parse_shorthand(const std::string& word) {
        auto u = Formula::make(Formula::Kind::Until);
        u->universal = word[0] == 'A';
        parse_bound(*u);
        FormulaPtr body = parse_primary();
        bool globally = word[1] == 'G';
        if (globally) {
            u->universal = !u->universal;
            auto inner_not = Formula::make(Formula::Kind::Not);
            inner_not->args = {body};
            body = inner_not;
        }
        u->args = {Formula::make(Formula::Kind::True), body};
        if (globally) {
            auto outer = Formula::make(Formula::Kind::Not);
            outer->args = {u};
            return outer;
        }
        return u;
    }

    void parse_bound(Formula& u) {
        if (!(lex_.peek().kind == Tok::Symbol && lex_.peek().text == "{")) return;
        lex_.next();
        Token op = lex_.next();
        if (op.kind != Tok::Symbol || (op.text != "<" && op.text != "<=" && op.text != ">" && op.text != ">="))
            throw parse_error("expected one of < <= > >= in until bound", op.line, op.col);
        u.bounded = true;
        u.bound_op = op.text == "<"    ? Comparator::LT
                     : op.text == "<=" ? Comparator::LE
                     : op.text == ">"  ? Comparator::GT
                                       : Comparator::GE;
        Token num = lex_.next();
        if (num.kind != Tok::Number) throw parse_error("expected bound value", num.line, num.col);
        u.bound = Rational::parse(num.text);
        expect_sym("}");
    }

    FormulaPtr parse_primary() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Symbol && t.text == "(") {
            lex_.next();
            FormulaPtr f = parse_or();
            expect_sym(")");
            return f;
        }
        if (t.kind == Tok::Symbol && t.text == "!") {
            lex_.next();
            auto n = Formula::make(Formula::Kind::Not);
            n->args = {parse_primary()};
            return n;
        }
        if (t.kind == Tok::Ident && (t.text == "E" || t.text == "A" || t.text == "EF" ||
                                     t.text == "AF" || t.text == "EG" || t.text == "AG"))
            return parse_unary();
        if (t.kind == Tok::Ident || t.kind == Tok::Number) return parse_atom_or_compare();
        if (t.kind == Tok::Symbol && t.text == "-") return parse_atom_or_compare();
        throw parse_error("expected formula, got '" + t.text + "'", t.line, t.col);
    }

    // identifier alone: atomic proposition (or true/false); anything involving
    // clocks, numbers, or a comparison operator: clock comparison.
    FormulaPtr parse_atom_or_compare() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Ident && clock_index(t.text) < 0) {
            Token id = lex_.next();
            if (id.text == "true") return Formula::make(Formula::Kind::True);
            if (id.text == "false") return Formula::make(Formula::Kind::False);
            if (is_compare_op()) {
                throw parse_error("comparisons must mention clocks; '" + id.text + "' is not a clock",
                                  id.line, id.col);
            }
            auto a = Formula::make(Formula::Kind::Atom);
            a->atom = id.text;
            return a;
        }
        LinExpr lhs = parse_expr();
        Token op = lex_.next();
        Comparator cmp;
        if (op.text == "<")
            cmp = Comparator::LT;
        else if (op.text == "<=")
            cmp = Comparator::LE;
        else if (op.text == "=")
            cmp = Comparator::EQ;
        else if (op.text == ">=")
            cmp = Comparator::GE;
        else if (op.text == ">")
            cmp = Comparator::GT;
        else
            throw parse_error("expected comparison operator, got '" + op.text + "'", op.line, op.col);
        LinExpr rhs = parse_expr();
        auto c = Formula::make(Formula::Kind::Compare);
        c->compare_expr = lhs - rhs;
        c->compare_op = cmp;
        return c;
    }

    bool is_compare_op() {
        const Token& t = lex_.peek();
        return t.kind == Tok::Symbol &&
               (t.text == "<" || t.text == "<=" || t.text == "=" || t.text == ">=" || t.text == ">");
    }

    LinExpr parse_expr() {
        LinExpr e = parse_term();
        while (lex_.peek().kind == Tok::Symbol && (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            bool minus = lex_.next().text == "-";
            LinExpr t = parse_term();
            if (minus)
                e -= t;
            else
                e += t;
        }
        return e;
    }

    LinExpr parse_term() {
        LinExpr e = parse_factor();
        while (lex_.peek().kind == Tok::Symbol && lex_.peek().text == "*") {
            Token star = lex_.next();
            LinExpr f = parse_factor();
            if (e.is_constant())
                e = f * e.constant();
            else if (f.is_constant())
                e = e * f.constant();
            else
                throw parse_error("nonlinear term", star.line, star.col);
        }
        return e;
    }

    LinExpr parse_factor() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Number) return LinExpr(Rational::parse(lex_.next().text));
        if (t.kind == Tok::Symbol && t.text == "-") {
            lex_.next();
            return -parse_factor();
        }
        if (t.kind == Tok::Symbol && t.text == "(") {
            lex_.next();
            LinExpr e = parse_expr();
            expect_sym(")");
            return e;
        }
        if (t.kind == Tok::Ident) {
            int c = clock_index(t.text);
            if (c >= 1) {
                lex_.next();
                return LinExpr::clock(c);
            }
        }
        throw parse_error("expected clock expression, got '" + t.text + "'", t.line, t.col);
    }

    static int clock_index(const std::string& ident) {
        if (ident.size() < 2 || ident[0] != 'x') return -1;
        for (std::size_t i = 1; i < ident.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(ident[i]))) return -1;
        return std::stoi(ident.substr(1));
    }

    void expect_sym(const std::string& s) {
        const Token& t = lex_.peek();
        if (t.kind != Tok::Symbol || t.text != s)
            throw parse_error("expected '" + s + "', got '" + t.text + "'", t.line, t.col);
        lex_.next();
    }

    bool accept_sym(const std::string& s) {
        if (lex_.peek().kind == Tok::Symbol && lex_.peek().text == s) {
            lex_.next();
            return true;
        }
        return false;
    }

    Lexer lex_;
};

}  // namespace detail

enum class FormulaFragment { TctlCInt, TctlP };

/// Parses a formula and classifies it. Bounded untils put the formula in
/// TCTL_p (propositional operands, no nesting); everything else is TCTL_c^int.
inline FormulaPtr parse_formula(const std::string& text, FormulaFragment* fragment = nullptr) {
    FormulaPtr f = detail::FormulaParser(text).parse();
    bool has_bounded = false, has_unbounded = false, has_compare = false;
    detail::classify(*f, has_bounded, has_unbounded, has_compare);
    if (has_bounded && (has_unbounded || has_compare))
        throw parse_error("bounded until cannot be mixed with nesting or clock comparisons", 0, 0);
    if (fragment) *fragment = has_bounded ? FormulaFragment::TctlP : FormulaFragment::TctlCInt;
    return f;
}

/// All clock comparisons occurring in the formula.
inline void collect_comparisons(const Formula& f, std::vector<LinExpr>& out) {
    if (f.kind == Formula::Kind::Compare) out.push_back(f.compare_expr);
    for (const auto& a : f.args) collect_comparisons(*a, out);
}

}  // namespace ita

#endif  // ITA_FORMULA_HPP
