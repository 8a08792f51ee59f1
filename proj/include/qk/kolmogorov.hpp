#pragma once
// The complexity engine: exact machine-relative K, its classical restriction,
// universal weights, and the measurement-driven approximation with Chernoff
// trial sizing.
//
// K(target | cond) = min over halting programs p of
//     l(p) + ceil(-log2 ||<output_p | target>||^2),
// ties broken by least length, then lexicographic bits. Reported values are
// always machine-relative (tagged with the MachineSpec that produced them).

#include "qk/codes.hpp"
#include "qk/enumerate.hpp"
#include "qk/machine.hpp"
#include "qk/prng.hpp"
#include "qk/state.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qk {

struct KEstimate {
    std::optional<long long> value;        // nullopt == infinite (no candidate)
    BitString witness;                     // minimising program
    std::optional<PureState> directly_computed;
    long long approx_part = 0;
    bool exact = false;                    // true when all improving lengths were enumerated

    bool infinite() const { return !value.has_value(); }
};

namespace detail {

struct Minimizer {
    std::optional<long long> best;
    const HaltRecord* witness = nullptr;
    long long approx = 0;

    // Records arrive in canonical (length-lexicographic) order, so keeping
    // the first strict minimum implements the least-length/lexicographic
    // tie-breaking rule.
    void offer(const HaltRecord& rec, long long penalty) {
        long long v = (long long)rec.bits.size() + penalty;
        if (!best || v < *best) {
            best = v;
            witness = &rec;
            approx = penalty;
        }
    }
};

}  // namespace detail

// Exact minimisation over a table. Each distinct output state is scored once;
// later programs with the same output are longer and cannot improve.
inline KEstimate k_quantum(const PureState& target, const HaltTable& table) {
    if (target.qubits() != table.cond.output_qubits())
        throw std::invalid_argument("k_quantum: target size does not match table condition");
    detail::Minimizer min;
    std::unordered_map<std::string, char> seen;
    for (const auto& rec : table.records) {
        auto [it, fresh] = seen.emplace(state_fingerprint(rec.output), 1);
        if (!fresh) continue;
        RingReal f = fidelity(rec.output, target);
        CodeLength penalty = ceil_neg_log2(f);
        if (penalty.infinite) continue;
        min.offer(rec, penalty.value);
    }
    KEstimate est;
    if (min.best) {
        est.value = *min.best;
        est.witness = min.witness->bits;
        est.directly_computed = min.witness->output;
        est.approx_part = min.approx;
    }
    return est;
}

// Explicit program preparing classical basis state `index`: NOT on every
// 1-bit, then HALT.
inline BitString basis_program(const MachineSpec& spec, const BitString& index) {
    std::vector<Instr> instrs;
    for (size_t q = 0; q < index.size(); ++q)
        if (index[q]) instrs.push_back(Instr{Opcode::Not, int(q), 0});
    instrs.push_back(Instr{Opcode::Halt, 0, 0});
    std::optional<int> uncond_n;
    if (spec.mode == Mode::Uncond) uncond_n = int(index.size());
    return encode_program(instrs, spec, uncond_n);
}

// Upper bound on K(target) from the best classical-basis approximation;
// every n-qubit state has a basis fidelity >= 2^-n, so the bound is finite.
inline long long classical_basis_bound(const PureState& target, const MachineSpec& spec,
                                       const ConditionSpec& cond) {
    const int n_out = cond.output_qubits();
    if (target.qubits() != n_out) throw std::invalid_argument("classical_basis_bound: size mismatch");
    std::optional<long long> best;
    for (size_t i = 0; i < target.dim(); ++i) {
        RingReal f = target.raw()[i].norm2() / target.norm2();
        CodeLength penalty = ceil_neg_log2(f);
        if (penalty.infinite) continue;
        long long len = (long long)basis_program(spec, BitString::from_ordinal(n_out, i)).size();
        long long v = len + penalty.value;
        if (!best || v < *best) best = v;
    }
    return *best;
}

// True machine minimum: enumerate all programs up to the classical-basis
// bound B; since the approximation part is nonnegative, no longer program
// can beat a value found below B.
inline KEstimate k_exact(const PureState& target, const MachineSpec& spec,
                         const ConditionSpec& cond, long long fuel = -1) {
    long long bound = classical_basis_bound(target, spec, cond);
    HaltTable table = dovetail(spec, cond, int(bound), fuel);
    KEstimate est = k_quantum(target, table);
    est.exact = true;
    return est;
}

// Same minimum from a prebuilt table, which must cover the stabilisation
// bound for this target.
inline KEstimate k_exact_with_table(const PureState& target, const HaltTable& table) {
    long long bound = classical_basis_bound(target, table.spec, table.cond);
    if (table.max_len < bound)
        throw std::invalid_argument("k_exact_with_table: table max_len below the required bound");
    KEstimate est = k_quantum(target, table);
    est.exact = true;
    return est;
}

struct ClassicalEstimate {
    KEstimate est;
    bool witness_is_exact = false;  // witness output equals the basis state (fidelity 1)
};

inline ClassicalEstimate k_classical(const BitString& x, const HaltTable& table) {
    PureState target = PureState::basis(int(x.size()), x);
    ClassicalEstimate out{k_quantum(target, table), false};
    if (out.est.value && out.est.directly_computed)
        out.witness_is_exact = fidelity(*out.est.directly_computed, target) == RingReal(Rational(1));
    return out;
}

// m(x) = 2^-K(x) over all n-bit strings with finite table complexity.
// The Kraft property (sum <= 1) holds exactly: 2^-K(x) <= 2^-l(p) * fidelity.
inline std::map<BitString, Rational> universal_weight(const HaltTable& table, int n) {
    if (n != table.cond.output_qubits())
        throw std::invalid_argument("universal_weight: n does not match table condition");
    std::map<BitString, Rational> weights;
    for (uint64_t i = 0; i < (uint64_t(1) << n); ++i) {
        BitString x = BitString::from_ordinal(n, i);
        ClassicalEstimate ce = k_classical(x, table);
        if (ce.est.value) weights.emplace(x, pow2(-*ce.est.value));
    }
    return weights;
}

// ----------------------------------------------------------------------------
// Measurement-driven approximation (trial sizing per the Chernoff bound).

// Least k with 2n - (eps^2 k log2 e)/6 <= log2(alpha).
inline long long sample_size(int n, double epsilon, double alpha) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("sample_size: epsilon in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("sample_size: alpha in (0,1)");
    const double log2e = std::log2(std::exp(1.0));
    auto satisfies = [&](long long k) {
        return 2.0 * n - (epsilon * epsilon * double(k) * log2e) / 6.0 <= std::log2(alpha);
    };
    long long k = (long long)std::ceil(6.0 * (2.0 * n - std::log2(alpha)) / (epsilon * epsilon * log2e));
    if (k < 0) k = 0;
    while (k > 0 && satisfies(k - 1)) --k;
    while (!satisfies(k)) ++k;
    return k;
}

// P(|m - qk| > eps q k) <= 2 exp(-eps^2 q k / 3).
inline double chernoff_tail(double epsilon, double q, long long k) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::domain_error("chernoff_tail: epsilon in [0,1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("chernoff_tail: q in [0,1]");
    if (k < 0) throw std::domain_error("chernoff_tail: k >= 0");
    return 2.0 * std::exp(-epsilon * epsilon * q * double(k) / 3.0);
}

struct MCConfig {
    double epsilon = 0.25;
    double alpha = 0.01;
    long long trials = 0;  // 0: use sample_size(n, epsilon, alpha)
    uint64_t seed = 1;
    bool allow_undersampled = false;
};

struct MCTraceRow {
    BitString bits;
    long long successes = 0;
    long long trials = 0;
    double est_real = 0.0;                // l(p) - log2(m / ((1+eps) k))
    std::optional<long long> est_value;   // l(p) + ceil(-log2(m / ((1+eps) k)))
};

struct MCResult {
    KEstimate est;
    long long trials = 0;
    std::vector<MCTraceRow> trace;
};

namespace detail {

// Exact rational value of a (finite, nonnegative) double.
inline Rational rational_from_double(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("rational_from_double");
    int exp = 0;
    double mant = std::frexp(x, &exp);
    long long scaled = (long long)std::ldexp(mant, 53);
    return Rational(Int(scaled)) * pow2(exp - 53);
}

}  // namespace detail

// Simulates k i.i.d. measurements of each enumerated halting program against
// the target (Bernoulli with the known fidelity standing in for the physical
// projection) and minimises the Step-2 estimate. The estimate never uses the
// fidelity directly, only the observed success counts.
inline MCResult mc_approximate(const PureState& target, const HaltTable& table,
                               const MCConfig& mc) {
    if (target.qubits() != table.cond.output_qubits())
        throw std::invalid_argument("mc_approximate: target size mismatch");
    long long needed = sample_size(table.cond.output_qubits(), mc.epsilon, mc.alpha);
    long long k = mc.trials > 0 ? mc.trials : needed;
    if (k < needed && !mc.allow_undersampled)
        throw std::invalid_argument("mc_approximate: trials below sample_size(n, epsilon, alpha) = " +
                                    std::to_string(needed));

    const Rational one_plus_eps = 1 + detail::rational_from_double(mc.epsilon);
    detail::Minimizer min;
    std::vector<MCTraceRow> trace;
    trace.reserve(table.records.size());
    std::vector<HaltRecord> const& records = table.records;
    for (const auto& rec : records) {
        RingReal q = fidelity(rec.output, target);
        uint64_t key = program_key(mc.seed, rec.bits);
        long long successes = 0;
        for (long long t = 0; t < k; ++t)
            if (bernoulli_exact(counter_draw(key, uint64_t(t)), q)) ++successes;

        MCTraceRow row{rec.bits, successes, k, 0.0, std::nullopt};
        if (successes > 0) {
            Rational estimate = Rational(successes) / (one_plus_eps * k);
            if (estimate > 1) estimate = 1;  // cap: fidelity estimates above 1 carry no code length
            CodeLength penalty = ceil_neg_log2(RingReal(estimate));
            long long v = (long long)rec.bits.size() + penalty.value;
            row.est_real = double(rec.bits.size()) -
                           std::log2(double(successes) / ((1.0 + mc.epsilon) * double(k)));
            row.est_value = v;
            min.offer(rec, penalty.value);
        }
        trace.push_back(std::move(row));
    }

    MCResult result;
    result.trials = k;
    if (min.best) {
        result.est.value = *min.best;
        result.est.witness = min.witness->bits;
        result.est.directly_computed = min.witness->output;
        result.est.approx_part = min.approx;
    }
    result.trace = std::move(trace);
    return result;
}

inline MCResult mc_approximate(const PureState& target, const MachineSpec& spec,
                               const ConditionSpec& cond, const MCConfig& mc) {
    long long bound = classical_basis_bound(target, spec, cond);
    HaltTable table = dovetail(spec, cond, int(bound));
    return mc_approximate(target, table, mc);
}

// ----------------------------------------------------------------------------
// Floating-point targets (states outside the exact ring), compared with a
// fixed 2^-40 tolerance on fidelities.

inline constexpr double kFloatFidelityTol = 9.094947017729282e-13;  // 2^-40

struct FloatState {
    int n = 0;
    std::vector<std::complex<double>> amps;
};

inline double fidelity_float(const PureState& a, const FloatState& b) {
    if (a.qubits() != b.n) throw std::invalid_argument("fidelity_float: dimension mismatch");
    std::complex<double> inner = 0.0;
    for (size_t i = 0; i < a.dim(); ++i) {
        std::complex<double> ai(a.raw()[i].re.to_double(), a.raw()[i].im.to_double());
        inner += std::conj(ai) * b.amps[i];
    }
    return std::norm(inner) / a.norm2().to_double();
}

inline long long ceil_neg_log2_float(double f) {
    long long t = 0;
    while (f < 1.0 - kFloatFidelityTol && t < 4096) {
        f *= 2.0;
        ++t;
    }
    return t;
}

inline KEstimate k_quantum_float(const FloatState& target, const HaltTable& table) {
    detail::Minimizer min;
    std::unordered_map<std::string, char> seen;
    for (const auto& rec : table.records) {
        auto [it, fresh] = seen.emplace(state_fingerprint(rec.output), 1);
        if (!fresh) continue;
        double f = fidelity_float(rec.output, target);
        if (f <= kFloatFidelityTol) continue;
        min.offer(rec, ceil_neg_log2_float(f));
    }
    KEstimate est;
    if (min.best) {
        est.value = *min.best;
        est.witness = min.witness->bits;
        est.directly_computed = min.witness->output;
        est.approx_part = min.approx;
    }
    return est;
}

}  // namespace qk
