#ifndef ITA_LINEXPR_HPP
#define ITA_LINEXPR_HPP

#include "ita/rational.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ita {

enum class Comparator { LT, LE, EQ, GE, GT };

inline Comparator reverse(Comparator c) {
    switch (c) {
        case Comparator::LT: return Comparator::GT;
        case Comparator::LE: return Comparator::GE;
        case Comparator::EQ: return Comparator::EQ;
        case Comparator::GE: return Comparator::LE;
        case Comparator::GT: return Comparator::LT;
    }
    return c;
}

inline bool comparator_holds(int sign, Comparator c) {
    switch (c) {
        case Comparator::LT: return sign < 0;
        case Comparator::LE: return sign <= 0;
        case Comparator::EQ: return sign == 0;
        case Comparator::GE: return sign >= 0;
        case Comparator::GT: return sign > 0;
    }
    return false;
}

inline std::string comparator_str(Comparator c) {
    switch (c) {
        case Comparator::LT: return "<";
        case Comparator::LE: return "<=";
        case Comparator::EQ: return "=";
        case Comparator::GE: return ">=";
        case Comparator::GT: return ">";
    }
    return "?";
}

class Update;

/// Clock valuation, 1-indexed.
class Valuation {
public:
    Valuation() = default;
    explicit Valuation(int clocks) : vals_(static_cast<std::size_t>(clocks)) {}
    Valuation(std::initializer_list<Rational> vs) : vals_(vs) {}

    int clocks() const { return static_cast<int>(vals_.size()); }
    const Rational& operator[](int clock) const { return vals_.at(static_cast<std::size_t>(clock - 1)); }
    Rational& operator[](int clock) { return vals_.at(static_cast<std::size_t>(clock - 1)); }

    friend bool operator==(const Valuation& a, const Valuation& b) { return a.vals_ == b.vals_; }

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < vals_.size(); ++i) {
            if (i) s += ", ";
            s += vals_[i].str();
        }
        return s + ")";
    }

private:
    std::vector<Rational> vals_;
};

/// Sparse linear expression sum(a_i * x_i) + b in canonical form:
/// no stored zero coefficients, terms keyed by clock index >= 1.
class LinExpr {
public:
    LinExpr() = default;
    LinExpr(Rational constant) : constant_(std::move(constant)) {}  // NOLINT(google-explicit-constructor)
    LinExpr(long constant) : constant_(constant) {}                 // NOLINT(google-explicit-constructor)

    static LinExpr clock(int index, Rational coeff = Rational(1)) {
        LinExpr e;
        e.add_term(index, std::move(coeff));
        return e;
    }

    const Rational& constant() const { return constant_; }
    const std::map<int, Rational>& terms() const { return terms_; }

    Rational coeff(int clock) const {
        auto it = terms_.find(clock);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(int clock, const Rational& coeff) {
        if (clock < 1) throw std::invalid_argument("clock index must be >= 1");
        if (coeff.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(clock, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    void add_constant(const Rational& c) { constant_ += c; }

    bool is_constant() const { return terms_.empty(); }
    bool is_zero() const { return terms_.empty() && constant_.is_zero(); }

    /// Highest clock index mentioned, 0 for constants.
    int max_clock() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    LinExpr& operator+=(const LinExpr& o) {
        for (const auto& [c, a] : o.terms_) add_term(c, a);
        constant_ += o.constant_;
        return *this;
    }
    LinExpr& operator-=(const LinExpr& o) {
        for (const auto& [c, a] : o.terms_) add_term(c, -a);
        constant_ -= o.constant_;
        return *this;
    }
    LinExpr& operator*=(const Rational& k) {
        if (k.is_zero()) {
            terms_.clear();
            constant_ = Rational(0);
            return *this;
        }
        for (auto& [c, a] : terms_) a *= k;
        constant_ *= k;
        return *this;
    }

    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(LinExpr a, const Rational& k) { return a *= k; }
    friend LinExpr operator*(const Rational& k, LinExpr a) { return a *= k; }
    LinExpr operator-() const { return *this * Rational(-1); }

    friend bool operator==(const LinExpr& a, const LinExpr& b) {
        return a.terms_ == b.terms_ && a.constant_ == b.constant_;
    }
    friend bool operator!=(const LinExpr& a, const LinExpr& b) { return !(a == b); }
    friend bool operator<(const LinExpr& a, const LinExpr& b) {
        if (a.terms_ != b.terms_) return a.terms_ < b.terms_;
        return a.constant_ < b.constant_;
    }

    Rational evaluate(const Valuation& v) const {
        Rational r = constant_;
        for (const auto& [c, a] : terms_) r += a * v[c];
        return r;
    }

    /// Terms in increasing clock index, constant last: "-1/2*x1 + 1".
    std::string str() const {
        if (terms_.empty()) return constant_.str();
        std::string s;
        bool first = true;
        for (const auto& [c, a] : terms_) {
            Rational mag = a.abs();
            if (first) {
                if (a.sign() < 0) s += "-";
                first = false;
            } else {
                s += a.sign() < 0 ? " - " : " + ";
            }
            if (mag != Rational(1)) s += mag.str() + "*";
            s += "x" + std::to_string(c);
        }
        if (!constant_.is_zero()) {
            s += constant_.sign() < 0 ? " - " : " + ";
            s += constant_.abs().str();
        }
        return s;
    }

private:
    std::map<int, Rational> terms_;
    Rational constant_;
};

/// Per-clock simultaneous assignment; clocks absent from the map keep their value.
class Update {
public:
    Update() = default;

    void set(int clock, LinExpr expr) {
        // An explicit identity is the same as no entry; keep canonical form.
        if (expr.terms().size() == 1 && expr.constant().is_zero() && expr.coeff(clock) == Rational(1)) {
            assigns_.erase(clock);
            return;
        }
        assigns_[clock] = std::move(expr);
    }

    bool is_identity(int clock) const { return assigns_.find(clock) == assigns_.end(); }
    bool is_all_identity() const { return assigns_.empty(); }

    const LinExpr* expr_for(int clock) const {
        auto it = assigns_.find(clock);
        return it == assigns_.end() ? nullptr : &it->second;
    }

    const std::map<int, LinExpr>& assignments() const { return assigns_; }

    friend bool operator==(const Update& a, const Update& b) { return a.assigns_ == b.assigns_; }

private:
    std::map<int, LinExpr> assigns_;
};

/// C[u]: substitute each assigned clock of u into C, simultaneously.
inline LinExpr substitute(const LinExpr& c, const Update& u) {
    LinExpr out(c.constant());
    for (const auto& [clock, coeff] : c.terms()) {
        if (const LinExpr* repl = u.expr_for(clock)) {
            out += *repl * coeff;
        } else {
            out.add_term(clock, coeff);
        }
    }
    return out;
}

/// v[u]: every assignment evaluated against the pre-update valuation.
inline Valuation apply_update(const Valuation& v, const Update& u) {
    Valuation out = v;
    for (const auto& [clock, expr] : u.assignments()) out[clock] = expr.evaluate(v);
    return out;
}

struct NormalizedExpr {
    LinExpr expr;
    bool flipped = false;  // comparator must be reversed to preserve solutions of C ⋈ 0
};

/// k-normalization: if the x_k coefficient a_k is nonzero, divide through so it
/// becomes 1; `flipped` is set when a_k < 0. Otherwise the expression is returned
/// unchanged. Expressions mentioning clocks above k are rejected.
inline NormalizedExpr normalize(const LinExpr& c, int level) {
    if (c.max_clock() > level) {
        throw std::invalid_argument("expression above level: " + c.str() + " at level " +
                                    std::to_string(level));
    }
    Rational ak = c.coeff(level);
    if (ak.is_zero()) return {c, false};
    LinExpr rest = c;
    rest.add_term(level, -ak);  // drop the x_k term
    NormalizedExpr out;
    out.expr = LinExpr::clock(level) + rest * ak.inverse();
    out.flipped = ak.sign() < 0;
    return out;
}

}  // namespace ita

#endif  // ITA_LINEXPR_HPP
