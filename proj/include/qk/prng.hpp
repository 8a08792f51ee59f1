#pragma once
// Counter-based deterministic generator for the measurement simulation:
// draw t for program p under seed s depends only on (s, p, t), so results
// are independent of scheduling and worker count.

#include "qk/bits.hpp"
#include "qk/rational.hpp"
#include "qk/ring.hpp"

#include <cstdint>

namespace qk {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t program_key(uint64_t seed, const BitString& bits) {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (i * 8)) & 0xFF;
            h *= 1099511628211ULL;
        }
    };
    mix(seed);
    mix(uint64_t(bits.size()));
    uint64_t acc = 0;
    int filled = 0;
    for (size_t i = 0; i < bits.size(); ++i) {
        acc = (acc << 1) | bits[i];
        if (++filled == 64) {
            mix(acc);
            acc = 0;
            filled = 0;
        }
    }
    if (filled) mix(acc);
    return h;
}

inline uint64_t counter_draw(uint64_t key, uint64_t trial) {
    return splitmix64(key ^ splitmix64(trial * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

// One Bernoulli(q) trial from a uniform 64-bit draw; u/2^64 < q decided by
// exact comparison. The parameter is quantised to a multiple of 2^-64, far
// below every tolerance used here.
inline bool bernoulli_exact(uint64_t draw, const RingReal& q) {
    RingReal u{Rational(Int(draw), Int(1) << 64)};
    return u < q;
}

}  // namespace qk
