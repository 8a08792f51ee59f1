#pragma once
// Exact rational arithmetic (arbitrary precision) plus the handful of
// integer helpers the exact ring and code-length computations need.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace qk {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational pow2(long long e) {
    if (e >= 0) return Rational(Int(1) << unsigned(e), 1);
    return Rational(1, Int(1) << unsigned(-e));
}

inline std::optional<Int> exact_isqrt(const Int& x) {
    if (x < 0) return std::nullopt;
    Int r = boost::multiprecision::sqrt(x);
    if (r * r == x) return r;
    return std::nullopt;
}

// sqrt of a nonnegative rational when the result is rational.
inline std::optional<Rational> exact_sqrt(const Rational& x) {
    if (x < 0) return std::nullopt;
    auto n = exact_isqrt(numerator(x));
    if (!n) return std::nullopt;
    auto d = exact_isqrt(denominator(x));
    if (!d) return std::nullopt;
    return Rational(*n, *d);
}

// Canonical "num/den" rendering, denominator always spelled out.
inline std::string rational_str(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational parse_rational(std::string_view s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) return Rational(Int(std::string(s)));
        Int num(std::string(s.substr(0, slash)));
        Int den(std::string(s.substr(slash + 1)));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational literal: " + std::string(s));
    }
}

// log2 of a positive big integer, in double precision.
inline double log2_int(const Int& x) {
    if (x <= 0) throw std::domain_error("log2_int: nonpositive");
    unsigned bits = boost::multiprecision::msb(x);
    if (bits <= 52) return std::log2(x.convert_to<double>());
    Int top = x >> (bits - 52);
    return double(bits - 52) + std::log2(top.convert_to<double>());
}

inline Int binomial(const Int& a, const Int& b) {
    if (b < 0 || b > a) return 0;
    Int k = b;
    if (a - b < k) k = a - b;
    Int result = 1;
    for (Int i = 1; i <= k; ++i) {
        result *= a - k + i;
        result /= i;
    }
    return result;
}

}  // namespace qk
