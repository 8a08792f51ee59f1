#pragma once
// Finite bit strings and the bijective string<->natural correspondence
// (0 <-> "", 1 <-> "0", 2 <-> "1", 3 <-> "00", ...) that the numeral
// renderings of the self-delimiting codes rely on.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qk {

class BitString {
  public:
    BitString() = default;

    explicit BitString(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
        for (uint8_t b : bits_) {
            if (b > 1) throw std::invalid_argument("BitString: bit out of range");
        }
    }

    static BitString from_string(std::string_view s) {
        std::vector<uint8_t> v;
        v.reserve(s.size());
        for (char c : s) {
            if (c == '0') {
                v.push_back(0);
            } else if (c == '1') {
                v.push_back(1);
            } else {
                throw std::invalid_argument("BitString: expected only '0'/'1'");
            }
        }
        return BitString(std::move(v));
    }

    // Bijective numbering from Appendix-style enumeration: write k+1 in
    // binary and drop the leading 1.
    static BitString from_natural(uint64_t k) {
        if (k == std::uint64_t(-1)) throw std::overflow_error("BitString: numeral too large");
        uint64_t v = k + 1;
        int top = 63;
        while (top > 0 && !((v >> top) & 1)) --top;
        std::vector<uint8_t> bits;
        for (int i = top - 1; i >= 0; --i) bits.push_back(uint8_t((v >> i) & 1));
        return BitString(std::move(bits));
    }

    uint64_t to_natural() const {
        if (size() >= 64) throw std::overflow_error("BitString: numeral too large");
        uint64_t v = 1;
        for (uint8_t b : bits_) v = (v << 1) | b;
        return v - 1;
    }

    // Ordinal of the string among all strings of its own length (MSB first).
    static BitString from_ordinal(int len, uint64_t ordinal) {
        if (len < 0 || len >= 64) throw std::invalid_argument("BitString: bad length");
        std::vector<uint8_t> bits(static_cast<size_t>(len));
        for (int i = 0; i < len; ++i) bits[size_t(i)] = uint8_t((ordinal >> (len - 1 - i)) & 1);
        return BitString(std::move(bits));
    }

    uint64_t to_ordinal() const {
        if (size() >= 64) throw std::overflow_error("BitString: too long");
        uint64_t v = 0;
        for (uint8_t b : bits_) v = (v << 1) | b;
        return v;
    }

    size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    uint8_t operator[](size_t i) const { return bits_[i]; }
    const std::vector<uint8_t>& raw() const { return bits_; }

    void push_back(uint8_t b) {
        if (b > 1) throw std::invalid_argument("BitString: bit out of range");
        bits_.push_back(b);
    }

    void append(const BitString& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    }

    BitString slice(size_t from, size_t count) const {
        if (from + count > bits_.size()) throw std::out_of_range("BitString::slice");
        return BitString(std::vector<uint8_t>(bits_.begin() + long(from),
                                              bits_.begin() + long(from + count)));
    }

    bool is_proper_prefix_of(const BitString& other) const {
        if (size() >= other.size()) return false;
        for (size_t i = 0; i < size(); ++i)
            if (bits_[i] != other.bits_[i]) return false;
        return true;
    }

    std::string str() const {
        std::string s;
        s.reserve(bits_.size());
        for (uint8_t b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    friend bool operator==(const BitString& a, const BitString& b) = default;

    // Plain lexicographic order (shorter-prefix first).
    friend bool operator<(const BitString& a, const BitString& b) {
        return a.bits_ < b.bits_;
    }

    friend std::ostream& operator<<(std::ostream& os, const BitString& b) {
        return os << b.str();
    }

  private:
    std::vector<uint8_t> bits_;
};

// Canonical enumeration order: by length, then lexicographic.
inline bool length_lex_less(const BitString& a, const BitString& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

}  // namespace qk
