#ifndef ITA_PARSER_HPP
#define ITA_PARSER_HPP

#include "ita/model.hpp"

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace ita {

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, int line, int col)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}
    int line;
    int col;
};

namespace detail {

enum class Tok { Ident, Number, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_ = {Tok::End, "", line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            tok_ = {Tok::Ident, src_.substr(start, pos_ - start), tok_.line, tok_.col};
            return;
        }
        if (c == '"') {
            bump();
            std::size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') bump();
            if (pos_ >= src_.size() || src_[pos_] != '"')
                throw parse_error("unterminated quoted name", tok_.line, tok_.col);
            std::string text = src_.substr(start, pos_ - start);
            bump();
            tok_ = {Tok::Ident, text, tok_.line, tok_.col};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == '/')) {
                bump();
                if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    throw parse_error("malformed rational literal", tok_.line, tok_.col);
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            }
            tok_ = {Tok::Number, src_.substr(start, pos_ - start), tok_.line, tok_.col};
            return;
        }
        // multi-char symbols
        for (const char* sym : {"->", ":=", "&&", "<=", ">="}) {
            std::size_t len = std::char_traits<char>::length(sym);
            if (src_.compare(pos_, len, sym) == 0) {
                for (std::size_t i = 0; i < len; ++i) bump();
                tok_ = {Tok::Symbol, sym, tok_.line, tok_.col};
                return;
            }
        }
        bump();
        tok_ = {Tok::Symbol, std::string(1, c), tok_.line, tok_.col};
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

class ModelParser {
public:
    explicit ModelParser(const std::string& src) : lex_(src) {}

    ITAModel parse() {
        expect_ident("ita");
        ITAModel m;
        m.name = expect(Tok::Ident).text;
        expect_sym("{");
        expect_ident("clocks");
        m.clock_count = expect_int();
        expect_sym(";");
        while (lex_.peek().kind == Tok::Ident) {
            if (lex_.peek().text == "state") {
                parse_state(m);
            } else if (lex_.peek().text == "trans") {
                parse_trans(m);
            } else {
                fail("expected 'state' or 'trans', got '" + lex_.peek().text + "'");
            }
        }
        expect_sym("}");
        if (lex_.peek().kind != Tok::End) fail("trailing input after model");
        m.finalize();
        return m;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error(msg, lex_.peek().line, lex_.peek().col);
    }

    Token expect(Tok kind) {
        if (lex_.peek().kind != kind) fail("unexpected token '" + lex_.peek().text + "'");
        return lex_.next();
    }

    void expect_ident(const std::string& word) {
        Token t = expect(Tok::Ident);
        if (t.text != word) throw parse_error("expected '" + word + "', got '" + t.text + "'", t.line, t.col);
    }

    void expect_sym(const std::string& s) {
        if (lex_.peek().kind != Tok::Symbol || lex_.peek().text != s)
            fail("expected '" + s + "', got '" + lex_.peek().text + "'");
        lex_.next();
    }

    bool accept_sym(const std::string& s) {
        if (lex_.peek().kind == Tok::Symbol && lex_.peek().text == s) {
            lex_.next();
            return true;
        }
        return false;
    }

    bool accept_ident(const std::string& word) {
        if (lex_.peek().kind == Tok::Ident && lex_.peek().text == word) {
            lex_.next();
            return true;
        }
        return false;
    }

    int expect_int() {
        Token t = expect(Tok::Number);
        Rational r = Rational::parse(t.text);
        if (!r.is_integer()) throw parse_error("expected integer, got " + t.text, t.line, t.col);
        return static_cast<int>(r.numerator().convert_to<long>());
    }

    static int clock_index(const std::string& ident) {
        if (ident.size() < 2 || ident[0] != 'x') return -1;
        for (std::size_t i = 1; i < ident.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(ident[i]))) return -1;
        return std::stoi(ident.substr(1));
    }

    void parse_state(ITAModel& m) {
        expect_ident("state");
        StateDecl s;
        s.name = expect(Tok::Ident).text;
        expect_ident("level");
        s.level = expect_int();
        if (accept_ident("policy")) {
            Token p = expect(Tok::Ident);
            if (p.text == "lazy")
                s.policy = Policy::Lazy;
            else if (p.text == "urgent")
                s.policy = Policy::Urgent;
            else if (p.text == "delayed")
                s.policy = Policy::Delayed;
            else
                throw parse_error("unknown policy '" + p.text + "'", p.line, p.col);
        }
        while (true) {
            if (accept_ident("initial")) {
                s.is_initial = true;
            } else if (accept_ident("final")) {
                s.is_final = true;
            } else if (accept_ident("labels")) {
                expect_sym("{");
                if (!accept_sym("}")) {
                    while (true) {
                        s.labels.insert(expect(Tok::Ident).text);
                        if (accept_sym("}")) break;
                        expect_sym(",");
                    }
                }
            } else {
                break;
            }
        }
        expect_sym(";");
        m.states.push_back(std::move(s));
    }

    void parse_trans(ITAModel& m) {
        expect_ident("trans");
        TransitionDecl t;
        Token src = expect(Tok::Ident);
        expect_sym("->");
        Token dst = expect(Tok::Ident);
        t.source = lookup_state(m, src);
        t.target = lookup_state(m, dst);
        if (accept_ident("on")) {
            Token a = expect(Tok::Ident);
            t.action = a.text == "eps" ? "" : a.text;
        }
        if (accept_ident("when")) {
            t.guard.push_back(parse_atom());
            while (accept_sym("&&")) t.guard.push_back(parse_atom());
        }
        if (accept_ident("do")) {
            parse_assignment(t.update);
            while (accept_sym(",")) parse_assignment(t.update);
        }
        expect_sym(";");
        m.transitions.push_back(std::move(t));
    }

    int lookup_state(const ITAModel& m, const Token& t) {
        for (std::size_t i = 0; i < m.states.size(); ++i)
            if (m.states[i].name == t.text) return static_cast<int>(i);
        throw parse_error("unknown state '" + t.text + "'", t.line, t.col);
    }

    void parse_assignment(Update& u) {
        Token c = expect(Tok::Ident);
        int clock = clock_index(c.text);
        if (clock < 1) throw parse_error("expected clock name, got '" + c.text + "'", c.line, c.col);
        expect_sym(":=");
        u.set(clock, parse_expr());
    }

    GuardAtom parse_atom() {
        LinExpr lhs = parse_expr();
        Token op = expect(Tok::Symbol);
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
        return GuardAtom{lhs - rhs, cmp};
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
        if (t.kind == Tok::Number) {
            Token num = lex_.next();
            try {
                return LinExpr(Rational::parse(num.text));
            } catch (const std::exception& e) {
                throw parse_error(e.what(), num.line, num.col);
            }
        }
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
            int clock = clock_index(t.text);
            if (clock >= 1) {
                lex_.next();
                return LinExpr::clock(clock);
            }
        }
        fail("expected expression, got '" + t.text + "'");
    }

    Lexer lex_;
};

}  // namespace detail

/// Parses the `.ita` concrete syntax. Throws parse_error with line/column on
/// malformed input; structural problems are left to ITAModel::validate.
inline ITAModel parse_ita(const std::string& source) { return detail::ModelParser(source).parse(); }

}  // namespace ita

#endif  // ITA_PARSER_HPP
