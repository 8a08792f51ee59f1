#pragma once
// Exact pure-state linear algebra over Q(sqrt 2): amplitudes, gates, tensor
// products, fidelity, factorisation checks and orthonormalisation.
//
// A state is stored as a raw amplitude vector together with its exact squared
// norm; the physical state is raw/sqrt(norm2). The ring is not closed under
// the square roots Gram-Schmidt produces, so the scale cannot always be
// folded into the amplitudes. Whenever sqrt(norm2) exists in the ring the
// representation is canonicalised to norm2 == 1.

#include "qk/bits.hpp"
#include "qk/ring.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qk {

class PureState {
  public:
    PureState(int n, std::vector<RingComplex> raw_amps, RingReal norm2 = RingReal(Rational(1)))
        : n_(n), amps_(std::move(raw_amps)), norm2_(std::move(norm2)) {
        if (n < 0 || n > 30) throw std::invalid_argument("PureState: bad qubit count");
        if (amps_.size() != (size_t(1) << n)) throw std::invalid_argument("PureState: amplitude count");
        RingReal sum;
        for (const auto& amp : amps_) sum += amp.norm2();
        if (!(sum == norm2_)) throw std::invalid_argument("PureState: norm2 mismatch");
        if (norm2_.sign() <= 0) throw std::invalid_argument("PureState: zero vector");
        canonicalize();
    }

    static PureState basis(int n, size_t index) {
        std::vector<RingComplex> amps(size_t(1) << n);
        amps.at(index) = RingComplex(RingReal(Rational(1)));
        return PureState(n, std::move(amps));
    }

    static PureState basis(int n, const BitString& index) {
        if (int(index.size()) != n) throw std::invalid_argument("basis_state: index length mismatch");
        return basis(n, size_t(index.to_ordinal()));
    }

    int qubits() const { return n_; }
    size_t dim() const { return amps_.size(); }
    const std::vector<RingComplex>& raw() const { return amps_; }
    const RingReal& norm2() const { return norm2_; }
    bool normalized_form() const { return norm2_ == RingReal(Rational(1)); }

    // Normalized amplitude i, valid only when norm2 == 1.
    const RingComplex& amp(size_t i) const {
        if (!normalized_form()) throw std::logic_error("PureState::amp on scaled representation");
        return amps_.at(i);
    }

    std::vector<RingReal> measure_probs() const {
        std::vector<RingReal> probs;
        probs.reserve(amps_.size());
        for (const auto& a : amps_) probs.push_back(a.norm2() / norm2_);
        return probs;
    }

    friend bool operator==(const PureState& a, const PureState& b) = default;

  private:
    void canonicalize() {
        if (normalized_form()) return;
        if (auto s = ring_sqrt(norm2_)) {
            for (auto& a : amps_) a = a / *s;
            norm2_ = RingReal(Rational(1));
        }
    }

    int n_;
    std::vector<RingComplex> amps_;
    RingReal norm2_;
};

// Canonical text key of the exact representation (for hashing/dedup).
inline std::string state_fingerprint(const PureState& s) {
    std::string key = s.norm2().str();
    for (const auto& a : s.raw()) {
        key += '|';
        key += a.re.str();
        key += ',';
        key += a.im.str();
    }
    return key;
}

inline RingComplex inner_raw(const PureState& a, const PureState& b) {
    if (a.qubits() != b.qubits()) throw std::invalid_argument("inner product: dimension mismatch");
    RingComplex sum;
    for (size_t i = 0; i < a.dim(); ++i) sum += a.raw()[i].conj() * b.raw()[i];
    return sum;
}

// ||<a|b>||^2, exact and phase-invariant.
inline RingReal fidelity(const PureState& a, const PureState& b) {
    return inner_raw(a, b).norm2() / (a.norm2() * b.norm2());
}

inline bool equal_up_to_phase(const PureState& a, const PureState& b) {
    return a.qubits() == b.qubits() && fidelity(a, b) == RingReal(Rational(1));
}

inline PureState tensor(const PureState& a, const PureState& b) {
    std::vector<RingComplex> amps;
    amps.reserve(a.dim() * b.dim());
    for (size_t i = 0; i < a.dim(); ++i)
        for (size_t j = 0; j < b.dim(); ++j) amps.push_back(a.raw()[i] * b.raw()[j]);
    return PureState(a.qubits() + b.qubits(), std::move(amps), a.norm2() * b.norm2());
}

inline PureState tensor_power(const PureState& s, int m) {
    if (m < 1) throw std::invalid_argument("tensor_power: m must be >= 1");
    PureState result = s;
    for (int i = 1; i < m; ++i) result = tensor(result, s);
    return result;
}

// ----------------------------------------------------------------------------
// Gates

enum class GateKind { X, CNOT, R, H, S };

inline const char* gate_name(GateKind g) {
    switch (g) {
        case GateKind::X: return "X";
        case GateKind::CNOT: return "CNOT";
        case GateKind::R: return "R";
        case GateKind::H: return "H";
        case GateKind::S: return "S";
    }
    return "?";
}

// Row-major 2x2 matrix.
struct Gate1 {
    RingComplex m00, m01, m10, m11;
};

inline Gate1 gate_matrix(GateKind g) {
    const RingReal one{Rational(1)};
    const RingReal is2 = RingReal::inv_sqrt2();
    switch (g) {
        case GateKind::X:
            return Gate1{RingComplex(), RingComplex(one), RingComplex(one), RingComplex()};
        case GateKind::R:
            // The fixed primitive rotation: cos = 3/5, sin = 4/5.
            return Gate1{RingComplex(RingReal(Rational(3, 5))), RingComplex(RingReal(Rational(-4, 5))),
                         RingComplex(RingReal(Rational(4, 5))), RingComplex(RingReal(Rational(3, 5)))};
        case GateKind::H:
            return Gate1{RingComplex(is2), RingComplex(is2), RingComplex(is2), RingComplex(-is2)};
        case GateKind::S:
            // "Square root of not": S^2 |0> = -|1>, S^2 |1> = |0>.
            return Gate1{RingComplex(is2), RingComplex(is2), RingComplex(-is2), RingComplex(is2)};
        case GateKind::CNOT:
            break;
    }
    throw std::invalid_argument("gate_matrix: CNOT is two-qubit");
}

// U-dagger U == I, checked exactly.
inline bool unitary_exact(const Gate1& g) {
    auto dag = [](const RingComplex& c) { return c.conj(); };
    RingComplex c00 = dag(g.m00) * g.m00 + dag(g.m10) * g.m10;
    RingComplex c01 = dag(g.m00) * g.m01 + dag(g.m10) * g.m11;
    RingComplex c10 = dag(g.m01) * g.m00 + dag(g.m11) * g.m10;
    RingComplex c11 = dag(g.m01) * g.m01 + dag(g.m11) * g.m11;
    const RingComplex one{RingReal(Rational(1))};
    return c00 == one && c11 == one && c01.is_zero() && c10.is_zero();
}

namespace detail {
// Qubit 0 is the leftmost bit of the basis index.
inline size_t qubit_mask(int n, int q) { return size_t(1) << (n - 1 - q); }
}  // namespace detail

inline PureState apply_1q(const PureState& s, const Gate1& g, int q) {
    int n = s.qubits();
    if (q < 0 || q >= n) throw std::out_of_range("apply_1q: qubit index");
    size_t mask = detail::qubit_mask(n, q);
    std::vector<RingComplex> amps = s.raw();
    for (size_t i = 0; i < amps.size(); ++i) {
        if (i & mask) continue;
        RingComplex a0 = amps[i];
        RingComplex a1 = amps[i | mask];
        amps[i] = g.m00 * a0 + g.m01 * a1;
        amps[i | mask] = g.m10 * a0 + g.m11 * a1;
    }
    return PureState(n, std::move(amps), s.norm2());
}

inline PureState apply_cnot(const PureState& s, int control, int target) {
    int n = s.qubits();
    if (control < 0 || control >= n || target < 0 || target >= n)
        throw std::out_of_range("apply_cnot: qubit index");
    if (control == target) throw std::invalid_argument("apply_cnot: repeated index");
    size_t cmask = detail::qubit_mask(n, control);
    size_t tmask = detail::qubit_mask(n, target);
    std::vector<RingComplex> amps = s.raw();
    for (size_t i = 0; i < amps.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) std::swap(amps[i], amps[i | tmask]);
    }
    return PureState(n, std::move(amps), s.norm2());
}

inline PureState apply_gate(const PureState& s, GateKind g, const std::vector<int>& qubits) {
    if (g == GateKind::CNOT) {
        if (qubits.size() != 2) throw std::invalid_argument("CNOT takes two qubit indices");
        return apply_cnot(s, qubits[0], qubits[1]);
    }
    if (qubits.size() != 1) throw std::invalid_argument("single-qubit gate takes one index");
    return apply_1q(s, gate_matrix(g), qubits[0]);
}

// ----------------------------------------------------------------------------
// Factorisation: does the state split as (first k qubits) x (rest)?
// Decided exactly via the rank of the k x (n-k) amplitude matrix.

inline std::optional<std::pair<PureState, PureState>> factor_prefix(const PureState& s, int k) {
    int n = s.qubits();
    if (k <= 0 || k >= n) throw std::out_of_range("factor_prefix: k out of range");
    size_t rows = size_t(1) << k;
    size_t cols = size_t(1) << (n - k);
    auto entry = [&](size_t i, size_t j) -> const RingComplex& { return s.raw()[i * cols + j]; };

    size_t pi = 0, pj = 0;
    bool found = false;
    for (size_t i = 0; i < rows && !found; ++i)
        for (size_t j = 0; j < cols && !found; ++j)
            if (!entry(i, j).is_zero()) {
                pi = i;
                pj = j;
                found = true;
            }
    // A state has nonzero norm, so a pivot always exists.
    const RingComplex pivot = entry(pi, pj);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j)
            if (!(entry(i, j) * pivot == entry(i, pj) * entry(pi, j))) return std::nullopt;

    std::vector<RingComplex> front(rows), back(cols);
    RingReal rf, rb;
    for (size_t i = 0; i < rows; ++i) {
        front[i] = entry(i, pj);
        rf += front[i].norm2();
    }
    for (size_t j = 0; j < cols; ++j) {
        back[j] = entry(pi, j);
        rb += back[j].norm2();
    }
    return std::make_pair(PureState(k, std::move(front), rf),
                          PureState(n - k, std::move(back), rb));
}

// ----------------------------------------------------------------------------
// Orthonormalisation

namespace detail {

struct RawVec {
    std::vector<RingComplex> v;
    RingReal norm2;
};

// Subtracts from `w` its projections onto the orthogonal family `basis`
// (members need not be unit; their norm2 values do the bookkeeping).
inline void project_out(std::vector<RingComplex>& w, const std::vector<RawVec>& basis) {
    for (const auto& e : basis) {
        RingComplex coeff;
        for (size_t i = 0; i < w.size(); ++i) coeff += e.v[i].conj() * w[i];
        if (coeff.is_zero()) continue;
        RingComplex scale = coeff / e.norm2;
        for (size_t i = 0; i < w.size(); ++i) w[i] -= scale * e.v[i];
    }
}

inline RingReal raw_norm2(const std::vector<RingComplex>& v) {
    RingReal r;
    for (const auto& c : v) r += c.norm2();
    return r;
}

}  // namespace detail

// Exact Gram-Schmidt; linearly dependent inputs are dropped.
inline std::vector<PureState> gram_schmidt(const std::vector<PureState>& vectors) {
    std::vector<detail::RawVec> ortho;
    int n = -1;
    for (const auto& s : vectors) {
        if (n < 0) n = s.qubits();
        if (s.qubits() != n) throw std::invalid_argument("gram_schmidt: mixed dimensions");
        std::vector<RingComplex> w = s.raw();
        detail::project_out(w, ortho);
        RingReal r = detail::raw_norm2(w);
        if (r.sign() == 0) continue;
        ortho.push_back({std::move(w), std::move(r)});
    }
    std::vector<PureState> out;
    out.reserve(ortho.size());
    for (auto& e : ortho) out.emplace_back(n, std::move(e.v), std::move(e.norm2));
    return out;
}

// Completes an orthonormal family to a full basis of the 2^n-dimensional
// space by greedily orthogonalising canonical basis vectors in lexicographic
// order (deterministic completion).
inline std::vector<PureState> extend_to_basis(const std::vector<PureState>& orthonormal, int n) {
    size_t dim = size_t(1) << n;
    if (orthonormal.size() > dim) throw std::invalid_argument("extend_to_basis: too many inputs");
    for (size_t i = 0; i < orthonormal.size(); ++i) {
        if (orthonormal[i].qubits() != n) throw std::invalid_argument("extend_to_basis: dimension mismatch");
        for (size_t j = i + 1; j < orthonormal.size(); ++j)
            if (!inner_raw(orthonormal[i], orthonormal[j]).is_zero())
                throw std::invalid_argument("extend_to_basis: inputs not orthogonal");
    }
    std::vector<detail::RawVec> ortho;
    for (const auto& s : orthonormal) ortho.push_back({s.raw(), s.norm2()});
    for (size_t cand = 0; cand < dim && ortho.size() < dim; ++cand) {
        std::vector<RingComplex> w(dim);
        w[cand] = RingComplex(RingReal(Rational(1)));
        detail::project_out(w, ortho);
        RingReal r = detail::raw_norm2(w);
        if (r.sign() == 0) continue;
        ortho.push_back({std::move(w), std::move(r)});
    }
    std::vector<PureState> out;
    out.reserve(dim);
    for (auto& e : ortho) out.emplace_back(n, std::move(e.v), std::move(e.norm2));
    return out;
}

}  // namespace qk
