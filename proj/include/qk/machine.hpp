#pragma once
// The concrete reference machine: a prefix-free binary program language
// decoded strictly left to right and interpreted as a quantum circuit on a
// bounded workspace.
//
// Opcode table (prefix-free):
//   "0"     ROT q      apply the fixed 3/5-4/5 rotation to qubit q
//   "10"    NOT q
//   "110"   CNOT q r   q control, r target, q != r
//   "11100" RUNAUX d   execute the auxiliary input as a program at offset d*n
//   "11101" REPAUX     execute the auxiliary input m times at offsets 0,n,...
//   "1111"  HALT
// Operands are fixed-width ceil(log2 W) bit indices. A program is accepted
// only if decoding ends exactly at HALT with no bits left over; the accepted
// set is prefix-free by construction.
//
// At HALT the first n_out workspace qubits must form a tensor product with
// the remainder; entangled outputs are invalid (treated as non-halting).

#include "qk/bits.hpp"
#include "qk/codes.hpp"
#include "qk/state.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qk {

enum class Mode { CondN, Uncond };

inline const char* mode_name(Mode m) { return m == Mode::CondN ? "cond-n" : "uncond"; }

inline Mode mode_from_name(std::string_view s) {
    if (s == "cond-n") return Mode::CondN;
    if (s == "uncond") return Mode::Uncond;
    throw std::invalid_argument("unknown machine mode: " + std::string(s));
}

struct MachineSpec {
    int workspace = 3;  // W
    Mode mode = Mode::CondN;

    int operand_width() const {
        int w = 0;
        while ((1 << w) < workspace) ++w;
        return w;
    }

    void validate() const {
        if (workspace < 1 || workspace > 12)
            throw std::invalid_argument("MachineSpec: workspace must be in [1,12]");
    }

    friend bool operator==(const MachineSpec&, const MachineSpec&) = default;
};

// Default workspace in conditional-n mode: n + 2 ancilla slack.
inline MachineSpec default_machine(int n) { return MachineSpec{n + 2, Mode::CondN}; }

struct ConditionSpec {
    int n = 1;                  // output qubit count per copy
    std::optional<int> m;       // copy count for REPAUX targets
    BitString aux;              // classical auxiliary input y

    int copies() const { return m.value_or(1); }
    int output_qubits() const { return n * copies(); }

    void validate(const MachineSpec& spec) const {
        if (spec.mode == Mode::CondN && n < 1) throw std::invalid_argument("ConditionSpec: n must be >= 1");
        if (m && *m < 1) throw std::invalid_argument("ConditionSpec: m must be >= 1");
        if (spec.mode == Mode::CondN && output_qubits() > spec.workspace)
            throw std::invalid_argument("ConditionSpec: m*n exceeds workspace");
    }

    friend bool operator==(const ConditionSpec&, const ConditionSpec&) = default;
};

enum class Opcode { Rot, Not, Cnot, RunAux, RepAux, Halt };

struct Instr {
    Opcode op = Opcode::Halt;
    int q = 0;  // qubit operand, or offset multiplier d for RUNAUX
    int r = 0;  // CNOT target

    friend bool operator==(const Instr&, const Instr&) = default;
};

struct Program {
    BitString raw;
    std::vector<Instr> instrs;  // always ends with Halt
    int uncond_n = 0;           // output size read from the program (uncond mode)
};

struct Invalid {
    std::string reason;  // "truncated", "operand", "trailing", "aux", "no-m", "entangled"
};

using DecodeResult = std::variant<Program, Invalid>;

namespace detail {

struct BitReader {
    const BitString& bits;
    size_t pos = 0;

    std::optional<uint8_t> next() {
        if (pos >= bits.size()) return std::nullopt;
        return bits[pos++];
    }

    std::optional<int> fixed(int width) {
        int v = 0;
        for (int i = 0; i < width; ++i) {
            auto b = next();
            if (!b) return std::nullopt;
            v = (v << 1) | *b;
        }
        return v;
    }
};

}  // namespace detail

inline DecodeResult decode_program(const BitString& bits, const MachineSpec& spec) {
    spec.validate();
    detail::BitReader rd{bits};
    Program prog;
    prog.raw = bits;

    if (spec.mode == Mode::Uncond) {
        auto numeral = decode_prime(bits, rd.pos);
        if (!numeral) return Invalid{"truncated"};
        uint64_t n = 0;
        try {
            n = numeral->to_natural();
        } catch (const std::overflow_error&) {
            return Invalid{"operand"};
        }
        if (n < 1 || int64_t(n) > spec.workspace) return Invalid{"operand"};
        prog.uncond_n = int(n);
    }

    const int w = spec.operand_width();
    auto operand = [&](int& out) -> std::optional<Invalid> {
        auto v = rd.fixed(w);
        if (!v) return Invalid{"truncated"};
        if (*v >= spec.workspace) return Invalid{"operand"};
        out = *v;
        return std::nullopt;
    };

    while (true) {
        auto b0 = rd.next();
        if (!b0) return Invalid{"truncated"};
        Instr ins;
        if (*b0 == 0) {
            ins.op = Opcode::Rot;
            if (auto err = operand(ins.q)) return *err;
        } else {
            auto b1 = rd.next();
            if (!b1) return Invalid{"truncated"};
            if (*b1 == 0) {
                ins.op = Opcode::Not;
                if (auto err = operand(ins.q)) return *err;
            } else {
                auto b2 = rd.next();
                if (!b2) return Invalid{"truncated"};
                if (*b2 == 0) {
                    ins.op = Opcode::Cnot;
                    if (auto err = operand(ins.q)) return *err;
                    if (auto err = operand(ins.r)) return *err;
                    if (ins.q == ins.r) return Invalid{"operand"};
                } else {
                    auto b3 = rd.next();
                    if (!b3) return Invalid{"truncated"};
                    if (*b3 == 1) {
                        ins.op = Opcode::Halt;
                        prog.instrs.push_back(ins);
                        if (rd.pos != bits.size()) return Invalid{"trailing"};
                        return prog;
                    }
                    auto b4 = rd.next();
                    if (!b4) return Invalid{"truncated"};
                    if (*b4 == 0) {
                        ins.op = Opcode::RunAux;
                        if (auto err = operand(ins.q)) return *err;
                    } else {
                        ins.op = Opcode::RepAux;
                    }
                }
            }
        }
        prog.instrs.push_back(ins);
    }
}

// Re-encodes an instruction sequence (it must end with Halt). Used to build
// explicit witness programs for another operand width.
inline BitString encode_program(const std::vector<Instr>& instrs, const MachineSpec& spec,
                                std::optional<int> uncond_n = std::nullopt) {
    const int w = spec.operand_width();
    BitString out;
    if (spec.mode == Mode::Uncond) {
        if (!uncond_n || *uncond_n < 1) throw std::invalid_argument("encode_program: uncond needs n");
        out.append(encode_prime(BitString::from_natural(uint64_t(*uncond_n))));
    }
    auto emit = [&](std::initializer_list<int> bits) {
        for (int b : bits) out.push_back(uint8_t(b));
    };
    auto emit_operand = [&](int v) {
        if (v < 0 || v >= spec.workspace) throw std::invalid_argument("encode_program: operand range");
        for (int i = w - 1; i >= 0; --i) out.push_back(uint8_t((v >> i) & 1));
    };
    for (const auto& ins : instrs) {
        switch (ins.op) {
            case Opcode::Rot: emit({0}); emit_operand(ins.q); break;
            case Opcode::Not: emit({1, 0}); emit_operand(ins.q); break;
            case Opcode::Cnot: emit({1, 1, 0}); emit_operand(ins.q); emit_operand(ins.r); break;
            case Opcode::RunAux: emit({1, 1, 1, 0, 0}); emit_operand(ins.q); break;
            case Opcode::RepAux: emit({1, 1, 1, 0, 1}); break;
            case Opcode::Halt: emit({1, 1, 1, 1}); break;
        }
    }
    return out;
}

struct Halted {
    PureState output;
    long long steps = 0;
};

struct FuelExhausted {};

using RunResult = std::variant<Halted, Invalid, FuelExhausted>;

inline bool halted(const RunResult& r) { return std::holds_alternative<Halted>(r); }

inline long long default_fuel(int max_len, const ConditionSpec& cond) {
    return 4LL * max_len + cond.copies() * 1LL * max_len;
}

namespace detail {

struct Interp {
    const MachineSpec& spec;
    const ConditionSpec& cond;
    long long fuel;

    PureState workspace;
    long long steps = 0;

    Interp(const MachineSpec& s, const ConditionSpec& c, long long f)
        : spec(s), cond(c), fuel(f), workspace(PureState::basis(s.workspace, size_t(0))) {}

    // Executes one instruction at a qubit offset. Returns an Invalid fault,
    // FuelExhausted, or nothing on success. Halt is handled by the caller.
    std::optional<RunResult> exec(const Instr& ins, int offset) {
        if (++steps > fuel) return RunResult{FuelExhausted{}};
        const int W = spec.workspace;
        switch (ins.op) {
            case Opcode::Rot:
                if (ins.q + offset >= W) return RunResult{Invalid{"operand"}};
                workspace = apply_1q(workspace, gate_matrix(GateKind::R), ins.q + offset);
                return std::nullopt;
            case Opcode::Not:
                if (ins.q + offset >= W) return RunResult{Invalid{"operand"}};
                workspace = apply_1q(workspace, gate_matrix(GateKind::X), ins.q + offset);
                return std::nullopt;
            case Opcode::Cnot:
                if (ins.q + offset >= W || ins.r + offset >= W) return RunResult{Invalid{"operand"}};
                workspace = apply_cnot(workspace, ins.q + offset, ins.r + offset);
                return std::nullopt;
            default:
                return RunResult{Invalid{"aux"}};  // nested aux, rejected earlier
        }
    }
};

inline std::optional<RunResult> exec_aux(Interp& in, const Program& aux, int offset) {
    for (const auto& ins : aux.instrs) {
        if (ins.op == Opcode::Halt) {
            if (++in.steps > in.fuel) return RunResult{FuelExhausted{}};
            return std::nullopt;  // aux halting ends only the aux execution
        }
        if (ins.op == Opcode::RunAux || ins.op == Opcode::RepAux)
            return RunResult{Invalid{"aux"}};  // depth-1 nesting only
        if (auto res = in.exec(ins, offset)) return res;
    }
    return std::nullopt;
}

}  // namespace detail

// Deterministic interpreter. Invalid results are absorbing: an invalid
// program counts as non-halting for all complexity purposes.
inline RunResult run(const MachineSpec& spec, const BitString& bits, const ConditionSpec& cond,
                     long long fuel) {
    spec.validate();
    cond.validate(spec);
    DecodeResult dec = decode_program(bits, spec);
    if (auto* inv = std::get_if<Invalid>(&dec)) return *inv;
    const Program& prog = std::get<Program>(dec);

    const int per_copy = (spec.mode == Mode::Uncond) ? prog.uncond_n : cond.n;
    const int n_out = per_copy * cond.copies();
    if (n_out < 1 || n_out > spec.workspace) return Invalid{"operand"};

    // Auxiliary program, decoded on demand and at most once.
    std::optional<DecodeResult> aux_dec;
    auto aux_program = [&]() -> const Program* {
        if (!aux_dec) aux_dec = decode_program(cond.aux, spec);
        return std::get_if<Program>(&*aux_dec);
    };

    detail::Interp interp(spec, cond, fuel);
    for (const auto& ins : prog.instrs) {
        switch (ins.op) {
            case Opcode::Halt: {
                if (++interp.steps > fuel) return FuelExhausted{};
                if (n_out == spec.workspace) return Halted{interp.workspace, interp.steps};
                auto split = factor_prefix(interp.workspace, n_out);
                if (!split) return Invalid{"entangled"};
                return Halted{split->first, interp.steps};
            }
            case Opcode::RunAux: {
                if (++interp.steps > fuel) return FuelExhausted{};
                const Program* aux = aux_program();
                if (!aux) return Invalid{"aux"};
                if (auto res = detail::exec_aux(interp, *aux, ins.q * per_copy)) return *res;
                break;
            }
            case Opcode::RepAux: {
                if (++interp.steps > fuel) return FuelExhausted{};
                if (!cond.m) return Invalid{"no-m"};
                const Program* aux = aux_program();
                if (!aux) return Invalid{"aux"};
                for (int copy = 0; copy < *cond.m; ++copy)
                    if (auto res = detail::exec_aux(interp, *aux, copy * per_copy)) return *res;
                break;
            }
            default:
                if (auto res = interp.exec(ins, 0)) return *res;
                break;
        }
    }
    // decode_program guarantees the instruction list ends with Halt.
    return Invalid{"truncated"};
}

}  // namespace qk
