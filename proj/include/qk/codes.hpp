#pragma once
// Self-delimiting codes, pairing, Kraft sums and Shannon-Fano code lengths.
// All decoders consume exactly the bits of the code word and report how many
// bits they read, which is what makes the prefix properties testable.

#include "qk/bits.hpp"
#include "qk/rational.hpp"
#include "qk/ring.hpp"

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qk {

// x-bar: 1 x1x1 x2x2 ... xn(~xn); the empty string encodes as "0".
// Length is exactly 2 l(x) + 1.
inline BitString encode_bar(const BitString& x) {
    BitString out;
    if (x.empty()) {
        out.push_back(0);
        return out;
    }
    out.push_back(1);
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        out.push_back(x[i]);
        out.push_back(x[i]);
    }
    uint8_t last = x[x.size() - 1];
    out.push_back(last);
    out.push_back(last ^ 1);
    return out;
}

// Reads one bar code word starting at `pos`; advances `pos` past it.
inline std::optional<BitString> decode_bar(const BitString& bits, size_t& pos) {
    if (pos >= bits.size()) return std::nullopt;
    if (bits[pos] == 0) {
        ++pos;
        return BitString();
    }
    ++pos;
    BitString x;
    while (true) {
        if (pos + 1 >= bits.size()) return std::nullopt;
        uint8_t b1 = bits[pos];
        uint8_t b2 = bits[pos + 1];
        pos += 2;
        x.push_back(b1);
        if (b1 != b2) return x;  // terminator pair
    }
}

// x-prime: bar(numeral(l(x))) followed by x itself.
inline BitString encode_prime(const BitString& x) {
    BitString out = encode_bar(BitString::from_natural(x.size()));
    out.append(x);
    return out;
}

inline std::optional<BitString> decode_prime(const BitString& bits, size_t& pos) {
    auto numeral = decode_bar(bits, pos);
    if (!numeral) return std::nullopt;
    uint64_t len = numeral->to_natural();
    if (pos + len > bits.size()) return std::nullopt;
    BitString x = bits.slice(pos, size_t(len));
    pos += size_t(len);
    return x;
}

// The prefix pairing <x,y> = x' y'.
inline BitString encode_pair(const BitString& x, const BitString& y) {
    BitString out = encode_prime(x);
    out.append(encode_prime(y));
    return out;
}

inline std::optional<std::pair<BitString, BitString>> decode_pair(const BitString& bits,
                                                                  size_t& pos) {
    auto x = decode_prime(bits, pos);
    if (!x) return std::nullopt;
    auto y = decode_prime(bits, pos);
    if (!y) return std::nullopt;
    return std::make_pair(*x, *y);
}

inline Rational kraft_sum(const std::vector<long long>& lengths) {
    Rational sum = 0;
    for (long long l : lengths) {
        if (l < 0) throw std::invalid_argument("kraft_sum: negative length");
        sum += pow2(-l);
    }
    return sum;
}

// Code length or "infinite" (for probability-zero entries the complexity
// minimisation must be able to skip).
struct CodeLength {
    bool infinite = false;
    long long value = 0;

    static CodeLength inf() { return CodeLength{true, 0}; }
    static CodeLength of(long long v) { return CodeLength{false, v}; }
    friend bool operator==(const CodeLength&, const CodeLength&) = default;
};

// Least integer t >= 0 with f >= 2^-t, decided by exact ring comparison.
// f == 0 yields the infinite length; f outside [0,1] is rejected.
inline CodeLength ceil_neg_log2(const RingReal& f) {
    int sgn = f.sign();
    if (sgn < 0 || f > RingReal(Rational(1))) throw std::domain_error("ceil_neg_log2: fidelity outside [0,1]");
    if (sgn == 0) return CodeLength::inf();
    long long t = 0;
    RingReal scaled = f;
    const RingReal one{Rational(1)};
    while (scaled < one) {
        scaled = scaled * RingReal(Rational(2));
        ++t;
        if (t > (1 << 20)) throw std::overflow_error("ceil_neg_log2: value out of range");
    }
    return CodeLength::of(t);
}

inline std::vector<CodeLength> shannon_fano_lengths(const std::vector<RingReal>& probs) {
    RingReal total;
    for (const auto& p : probs) {
        if (p.sign() < 0 || p > RingReal(Rational(1)))
            throw std::domain_error("shannon_fano_lengths: probability outside [0,1]");
        total += p;
    }
    if (total > RingReal(Rational(1)))
        throw std::domain_error("shannon_fano_lengths: probabilities exceed 1");
    std::vector<CodeLength> lengths;
    lengths.reserve(probs.size());
    for (const auto& p : probs) lengths.push_back(ceil_neg_log2(p));
    return lengths;
}

}  // namespace qk
