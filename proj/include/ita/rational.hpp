#ifndef ITA_RATIONAL_HPP
#define ITA_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ita {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Always reduced, denominator > 0, zero is 0/1.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}                       // NOLINT(google-explicit-constructor)
    Rational(const BigInt& n) : v_(n) {}              // NOLINT(google-explicit-constructor)
    Rational(const BigInt& num, const BigInt& den) : v_(checked(num, den)) {}
    Rational(long num, long den) : Rational(BigInt(num), BigInt(den)) {}

    BigInt numerator() const { return boost::multiprecision::numerator(v_); }
    BigInt denominator() const { return boost::multiprecision::denominator(v_); }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return denominator() == 1; }
    int sign() const { return v_ < 0 ? -1 : (v_ > 0 ? 1 : 0); }

    Rational operator-() const { return Rational(-v_); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational inverse() const {
        if (is_zero()) throw std::domain_error("inverse of zero");
        return Rational(denominator(), numerator());
    }

    Rational abs() const { return v_ < 0 ? Rational(-v_) : *this; }

    /// Renders "p" for integers, "p/q" otherwise.
    std::string str() const {
        std::string s = numerator().str();
        if (!is_integer()) s += "/" + denominator().str();
        return s;
    }

    /// Accepts "p", "-p", "p/q", and decimals with finite expansion ("1.5").
    static Rational parse(const std::string& text) {
        std::size_t pos = 0;
        Rational r = parse_prefix(text, pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters in rational: " + text);
        return r;
    }

    /// Parses a rational literal starting at `pos`, advancing it past the literal.
    static Rational parse_prefix(const std::string& text, std::size_t& pos) {
        std::size_t i = pos;
        bool neg = false;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
            neg = text[i] == '-';
            ++i;
        }
        std::size_t digits_start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == digits_start) throw std::invalid_argument("invalid rational: " + text);
        BigInt num(text.substr(digits_start, i - digits_start));
        BigInt den = 1;
        if (i < text.size() && text[i] == '.') {
            ++i;
            std::size_t frac_start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i == frac_start) throw std::invalid_argument("invalid decimal: " + text);
            for (std::size_t k = frac_start; k < i; ++k) {
                num = num * 10 + (text[k] - '0');
                den *= 10;
            }
        } else if (i < text.size() && text[i] == '/') {
            ++i;
            std::size_t den_start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i == den_start) throw std::invalid_argument("invalid rational: " + text);
            den = BigInt(text.substr(den_start, i - den_start));
            if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        }
        pos = i;
        Rational r(num, den);
        return neg ? -r : r;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    explicit Rational(boost::multiprecision::cpp_rational v) : v_(std::move(v)) {}

    static boost::multiprecision::cpp_rational checked(const BigInt& num, const BigInt& den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) return {-num, -den};
        return {num, den};
    }

    boost::multiprecision::cpp_rational v_;
};

inline BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }
inline BigInt lcm(const BigInt& a, const BigInt& b) { return boost::multiprecision::lcm(a, b); }

}  // namespace ita

#endif  // ITA_RATIONAL_HPP
