#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <string>

namespace eulerfan {

/**
 * Exact element a + b*sqrt(2) of the field Q(sqrt 2), with arbitrary
 * precision rational coordinates.
 */
class QuadraticNumber {
public:
    QuadraticNumber() = default;
    QuadraticNumber(long value) : a_(value), b_(0) {}
    QuadraticNumber(const mpq_class& a, const mpq_class& b = 0);

    static QuadraticNumber sqrt2() { return QuadraticNumber(0, 1); }
    static QuadraticNumber rational(long num, long den);
    /// Parses "p/q", an integer, or a finite decimal such as "5.0" or "1.25e-3" exactly.
    static QuadraticNumber parse_rational(const std::string& text);

    const mpq_class& rational_part() const { return a_; }
    const mpq_class& sqrt2_part() const { return b_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }
    int sign() const;

    QuadraticNumber conjugate() const { return QuadraticNumber(a_, -b_); }
    /// Field norm a^2 - 2 b^2; zero only for the zero element.
    mpq_class norm() const { return a_ * a_ - 2 * b_ * b_; }
    QuadraticNumber inverse() const;

    double to_double() const;
    std::string str() const;

    QuadraticNumber operator-() const { return QuadraticNumber(-a_, -b_); }
    QuadraticNumber& operator+=(const QuadraticNumber& o);
    QuadraticNumber& operator-=(const QuadraticNumber& o);
    QuadraticNumber& operator*=(const QuadraticNumber& o);
    QuadraticNumber& operator/=(const QuadraticNumber& o);

    friend QuadraticNumber operator+(QuadraticNumber x, const QuadraticNumber& y) { return x += y; }
    friend QuadraticNumber operator-(QuadraticNumber x, const QuadraticNumber& y) { return x -= y; }
    friend QuadraticNumber operator*(QuadraticNumber x, const QuadraticNumber& y) { return x *= y; }
    friend QuadraticNumber operator/(QuadraticNumber x, const QuadraticNumber& y) { return x /= y; }

    friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend std::strong_ordering operator<=>(const QuadraticNumber& x, const QuadraticNumber& y) {
        const int s = (x - y).sign();
        return s < 0 ? std::strong_ordering::less
                     : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadraticNumber& x);

private:
    mpq_class a_{0};
    mpq_class b_{0};
};

inline double to_double(double x) { return x; }
inline double to_double(const QuadraticNumber& x) { return x.to_double(); }

}  // namespace eulerfan
