#pragma once
// The exact ring Q(sqrt 2): numbers a + b*sqrt(2) with rational a, b.
// Everything the simulator touches (amplitudes, fidelities, probabilities)
// lives here so that every comparison is an exact sign decision.

#include "qk/rational.hpp"

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qk {

struct RingReal {
    Rational a;  // rational part
    Rational b;  // coefficient of sqrt(2)

    RingReal() : a(0), b(0) {}
    RingReal(Rational rational) : a(std::move(rational)), b(0) {}  // NOLINT(google-explicit-constructor)
    RingReal(long long v) : a(v), b(0) {}                          // NOLINT(google-explicit-constructor)
    RingReal(Rational ra, Rational rb) : a(std::move(ra)), b(std::move(rb)) {}

    static RingReal sqrt2() { return RingReal(Rational(0), Rational(1)); }
    // 1/sqrt(2) == sqrt(2)/2
    static RingReal inv_sqrt2() { return RingReal(Rational(0), Rational(1, 2)); }

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }

    friend RingReal operator+(const RingReal& x, const RingReal& y) {
        return RingReal(x.a + y.a, x.b + y.b);
    }
    friend RingReal operator-(const RingReal& x, const RingReal& y) {
        return RingReal(x.a - y.a, x.b - y.b);
    }
    friend RingReal operator-(const RingReal& x) { return RingReal(-x.a, -x.b); }
    friend RingReal operator*(const RingReal& x, const RingReal& y) {
        return RingReal(x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a);
    }
    friend RingReal operator/(const RingReal& x, const RingReal& y) {
        if (y.is_zero()) throw std::domain_error("RingReal: division by zero");
        // Multiply by the conjugate; a^2 - 2 b^2 vanishes only at y == 0
        // because sqrt(2) is irrational.
        Rational den = y.a * y.a - 2 * y.b * y.b;
        RingReal num = x * RingReal(y.a, -y.b);
        return RingReal(num.a / den, num.b / den);
    }

    RingReal& operator+=(const RingReal& y) { return *this = *this + y; }
    RingReal& operator-=(const RingReal& y) { return *this = *this - y; }
    RingReal& operator*=(const RingReal& y) { return *this = *this * y; }
    RingReal& operator/=(const RingReal& y) { return *this = *this / y; }

    // Exact sign of a + b*sqrt(2).
    int sign() const {
        int sa = a.sign();
        int sb = b.sign();
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // Opposite signs: compare a^2 against 2 b^2 on the dominant side.
        Rational lhs = a * a;
        Rational rhs = 2 * b * b;
        if (lhs == rhs) return 0;  // only possible at a = b = 0
        return (lhs > rhs) ? sa : sb;
    }

    friend bool operator==(const RingReal& x, const RingReal& y) {
        return x.a == y.a && x.b == y.b;
    }
    friend bool operator<(const RingReal& x, const RingReal& y) { return (x - y).sign() < 0; }
    friend bool operator<=(const RingReal& x, const RingReal& y) { return (x - y).sign() <= 0; }
    friend bool operator>(const RingReal& x, const RingReal& y) { return (x - y).sign() > 0; }
    friend bool operator>=(const RingReal& x, const RingReal& y) { return (x - y).sign() >= 0; }

    double to_double() const {
        return a.convert_to<double>() + b.convert_to<double>() * std::sqrt(2.0);
    }

    // Canonical literal: "a_num/a_den+b_num/b_den*r2", lowest terms.
    std::string str() const { return rational_str(a) + "+" + rational_str(b) + "*r2"; }

    friend std::ostream& operator<<(std::ostream& os, const RingReal& r) { return os << r.str(); }
};

inline RingReal parse_ring_real(std::string_view s) {
    auto star = s.rfind("*r2");
    if (star == std::string_view::npos || star + 3 != s.size())
        throw std::invalid_argument("malformed ring literal (missing *r2): " + std::string(s));
    std::string_view body = s.substr(0, star);
    // The separating '+' is the first '+' past position 0; numerators carry
    // their own leading '-' and contain no '+'.
    auto plus = body.find('+', 1);
    if (plus == std::string_view::npos)
        throw std::invalid_argument("malformed ring literal: " + std::string(s));
    return RingReal(parse_rational(body.substr(0, plus)), parse_rational(body.substr(plus + 1)));
}

// sqrt within the ring, when it exists: solves (c + d*sqrt2)^2 = a + b*sqrt2.
inline std::optional<RingReal> ring_sqrt(const RingReal& x) {
    if (x.sign() < 0) return std::nullopt;
    if (x.is_zero()) return RingReal();
    if (x.b == 0) {
        if (auto c = exact_sqrt(x.a)) return RingReal(*c, Rational(0));
        if (auto d = exact_sqrt(x.a / 2)) return RingReal(Rational(0), *d);
        return std::nullopt;
    }
    // c^2 + 2 d^2 = a, 2 c d = b  =>  c^2 = (a +- e)/2 with e = sqrt(a^2 - 2 b^2).
    auto e = exact_sqrt(x.a * x.a - 2 * x.b * x.b);
    if (!e) return std::nullopt;
    for (int pick = 0; pick < 2; ++pick) {
        Rational c2 = (pick == 0) ? Rational((x.a + *e) / 2) : Rational((x.a - *e) / 2);
        if (c2 <= 0) continue;
        auto c = exact_sqrt(c2);
        if (!c) continue;
        Rational d = x.b / (2 * *c);
        RingReal root(*c, d);
        if (root.sign() < 0) root = -root;
        if (root * root == x) return root;
    }
    return std::nullopt;
}

struct RingComplex {
    RingReal re;
    RingReal im;

    RingComplex() = default;
    RingComplex(RingReal r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    RingComplex(RingReal r, RingReal i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    friend RingComplex operator+(const RingComplex& x, const RingComplex& y) {
        return RingComplex(x.re + y.re, x.im + y.im);
    }
    friend RingComplex operator-(const RingComplex& x, const RingComplex& y) {
        return RingComplex(x.re - y.re, x.im - y.im);
    }
    friend RingComplex operator-(const RingComplex& x) { return RingComplex(-x.re, -x.im); }
    friend RingComplex operator*(const RingComplex& x, const RingComplex& y) {
        return RingComplex(x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re);
    }
    RingComplex& operator+=(const RingComplex& y) { return *this = *this + y; }
    RingComplex& operator-=(const RingComplex& y) { return *this = *this - y; }
    RingComplex& operator*=(const RingComplex& y) { return *this = *this * y; }

    friend RingComplex operator/(const RingComplex& x, const RingReal& s) {
        return RingComplex(x.re / s, x.im / s);
    }

    RingComplex conj() const { return RingComplex(re, -im); }
    RingReal norm2() const { return re * re + im * im; }

    friend bool operator==(const RingComplex& x, const RingComplex& y) = default;
};

}  // namespace qk
