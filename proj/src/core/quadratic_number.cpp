#include "eulerfan/core/quadratic_number.hpp"

#include "eulerfan/core/errors.hpp"

#include <cctype>
#include <cmath>
#include <ostream>

namespace eulerfan {

QuadraticNumber::QuadraticNumber(const mpq_class& a, const mpq_class& b) : a_(a), b_(b) {
    a_.canonicalize();
    b_.canonicalize();
}

QuadraticNumber QuadraticNumber::rational(long num, long den) {
    if (den == 0) throw DomainError("QuadraticNumber::rational: zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return QuadraticNumber(q, 0);
}

QuadraticNumber QuadraticNumber::parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw DomainError("empty number");

    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        mpz_class num, den;
        if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
            throw DomainError("cannot parse rational '" + text + "'");
        if (den == 0) throw DomainError("zero denominator in '" + text + "'");
        mpq_class q(num, den);
        q.canonicalize();
        return QuadraticNumber(q, 0);
    }

    // Decimal: [sign] digits [. digits] [e|E [sign] digits]
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') negative = (s[i++] == '-');
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw DomainError("cannot parse number '" + text + "'");
    long exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw DomainError("cannot parse number '" + text + "'");
        ++i;
        std::size_t used = 0;
        try {
            exponent = std::stol(s.substr(i), &used);
        } catch (const std::exception&) {
            throw DomainError("cannot parse exponent in '" + text + "'");
        }
        if (i + used != s.size()) throw DomainError("trailing characters in '" + text + "'");
    }
    mpz_class mant(digits, 10);
    if (negative) mant = -mant;
    const long shift = exponent - frac_digits;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    mpq_class q = shift < 0 ? mpq_class(mant, pow10) : mpq_class(mant * pow10);
    q.canonicalize();
    return QuadraticNumber(q, 0);
}

int QuadraticNumber::sign() const {
    const int sa = sgn(a_);
    const int sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare a^2 with 2 b^2
    const int c = cmp(a_ * a_, 2 * b_ * b_);
    if (c > 0) return sa;
    if (c < 0) return sb;
    return 0;  // unreachable for nonzero rationals since sqrt 2 is irrational
}

QuadraticNumber QuadraticNumber::inverse() const {
    const mpq_class n = norm();
    if (sgn(n) == 0) throw DomainError("QuadraticNumber::inverse of zero");
    return QuadraticNumber(a_ / n, -b_ / n);
}

QuadraticNumber& QuadraticNumber::operator+=(const QuadraticNumber& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

QuadraticNumber& QuadraticNumber::operator-=(const QuadraticNumber& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

QuadraticNumber& QuadraticNumber::operator*=(const QuadraticNumber& o) {
    mpq_class na = a_ * o.a_ + 2 * b_ * o.b_;
    mpq_class nb = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
}

QuadraticNumber& QuadraticNumber::operator/=(const QuadraticNumber& o) {
    return *this *= o.inverse();
}

double QuadraticNumber::to_double() const {
    static const double r2 = std::sqrt(2.0);
    const int sa = sgn(a_);
    const int sb = sgn(b_);
    if (sa == 0 || sb == 0 || sa == sb) return a_.get_d() + b_.get_d() * r2;
    // a + b sqrt2 = (a^2 - 2 b^2) / (a - b sqrt2); the denominator has no cancellation
    const mpq_class n = norm();
    return n.get_d() / (a_.get_d() - b_.get_d() * r2);
}

std::string QuadraticNumber::str() const {
    const bool ha = sgn(a_) != 0;
    const bool hb = sgn(b_) != 0;
    if (!hb) return a_.get_str();
    std::string out;
    if (ha) {
        out = a_.get_str();
        out += sgn(b_) < 0 ? " - " : " + ";
        mpq_class ab = abs(b_);
        out += (ab == 1 ? std::string() : ab.get_str() + "*") + "sqrt(2)";
        return out;
    }
    if (b_ == 1) return "sqrt(2)";
    if (b_ == -1) return "-sqrt(2)";
    return b_.get_str() + "*sqrt(2)";
}

std::ostream& operator<<(std::ostream& os, const QuadraticNumber& x) { return os << x.str(); }

}  // namespace eulerfan
