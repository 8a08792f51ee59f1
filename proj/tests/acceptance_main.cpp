// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Exits nonzero if any criterion fails. argv[1] (optional) is the
// path to the qk CLI binary, needed by the determinism criterion.

#include "qk/audits.hpp"
#include "qk/codes.hpp"
#include "qk/enumerate.hpp"
#include "qk/kolmogorov.hpp"
#include "qk/machine.hpp"
#include "qk/prng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

using namespace qk;

namespace {

struct Failures {
    std::vector<std::string> messages;

    void expect(bool ok, const std::string& what) {
        if (!ok) messages.push_back(what);
    }
};

std::string g_cli_path;

BitString bits_of(const char* s) { return BitString::from_string(s); }

std::vector<BitString> all_strings(int max_len, bool include_empty) {
    std::vector<BitString> out;
    if (include_empty) out.emplace_back();
    for (int len = 1; len <= max_len; ++len)
        for (uint64_t v = 0; v < (uint64_t(1) << len); ++v) out.push_back(BitString::from_ordinal(len, v));
    return out;
}

// Seeded exact-ring target: a short random word over the full gate set.
PureState seeded_target(int n, uint64_t seed) {
    PureState s = PureState::basis(n, size_t(0));
    uint64_t state = splitmix64(seed * 0x9E3779B97F4A7C15ULL + 17);
    auto next = [&](uint64_t mod) {
        state = splitmix64(state);
        return state % mod;
    };
    int ops = 4 + int(next(6));
    for (int i = 0; i < ops; ++i) {
        int q = int(next(uint64_t(n)));
        switch (next(n >= 2 ? 5 : 4)) {
            case 0: s = apply_1q(s, gate_matrix(GateKind::R), q); break;
            case 1: s = apply_1q(s, gate_matrix(GateKind::X), q); break;
            case 2: s = apply_1q(s, gate_matrix(GateKind::H), q); break;
            case 3: s = apply_1q(s, gate_matrix(GateKind::S), q); break;
            default: {
                int r = int((q + 1 + next(uint64_t(n - 1))) % uint64_t(n));
                if (r == q) r = (q + 1) % n;
                s = apply_cnot(s, q, r);
                break;
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

void criterion_code_laws(Failures& f) {
    for (const auto& x : all_strings(12, true)) {
        BitString bar = encode_bar(x);
        f.expect(bar.size() == 2 * x.size() + 1, "bar length law failed at " + x.str());
        size_t pos = 0;
        auto back = decode_bar(bar, pos);
        f.expect(back && *back == x && pos == bar.size(), "bar round trip failed at " + x.str());

        BitString prime = encode_prime(x);
        pos = 0;
        auto pback = decode_prime(prime, pos);
        f.expect(pback && *pback == x && pos == prime.size(),
                 "prime round trip failed at " + x.str());
    }
    std::vector<BitString> primes;
    for (const auto& x : all_strings(10, true)) primes.push_back(encode_prime(x));
    std::sort(primes.begin(), primes.end());
    for (size_t i = 0; i + 1 < primes.size(); ++i)
        f.expect(!primes[i].is_proper_prefix_of(primes[i + 1]),
                 "prime codes not prefix-free near " + primes[i].str());
}

void criterion_kraft(Failures& f) {
    const MachineSpec spec{3, Mode::CondN};
    const ConditionSpec cond{1, std::nullopt, {}};
    HaltTable table = dovetail(spec, cond, 16);
    f.expect(!table.records.empty(), "no halting programs found");

    std::vector<long long> lengths;
    for (const auto& rec : table.records) lengths.push_back((long long)rec.bits.size());
    f.expect(kraft_sum(lengths) <= 1, "Kraft sum over halting programs exceeds 1");

    std::vector<BitString> accepted;
    for (int len = 1; len <= 16; ++len)
        for (uint64_t v = 0; v < (uint64_t(1) << len); ++v) {
            BitString b = BitString::from_ordinal(len, v);
            if (std::holds_alternative<Program>(decode_program(b, spec))) accepted.push_back(b);
        }
    std::sort(accepted.begin(), accepted.end());
    for (size_t i = 0; i + 1 < accepted.size(); ++i)
        f.expect(!accepted[i].is_proper_prefix_of(accepted[i + 1]),
                 "accepted set not prefix-free near " + accepted[i].str());
    Rational kraft_accepted = 0;
    for (const auto& b : accepted) kraft_accepted += pow2(-(long long)b.size());
    f.expect(kraft_accepted <= 1, "Kraft sum over decode-accepted programs exceeds 1");
}

void criterion_gates(Failures& f) {
    const RingReal one{Rational(1)};
    PureState zero = PureState::basis(1, size_t(0));
    PureState one_state = PureState::basis(1, size_t(1));

    PureState s2z = apply_1q(apply_1q(zero, gate_matrix(GateKind::S), 0), gate_matrix(GateKind::S), 0);
    f.expect(s2z.amp(0).is_zero() && s2z.amp(1) == RingComplex(RingReal(Rational(-1))),
             "S^2|0> != -|1>");
    PureState s2o =
        apply_1q(apply_1q(one_state, gate_matrix(GateKind::S), 0), gate_matrix(GateKind::S), 0);
    f.expect(s2o.amp(0) == RingComplex(one) && s2o.amp(1).is_zero(), "S^2|1> != |0>");

    for (const PureState& s : {zero, one_state, apply_1q(zero, gate_matrix(GateKind::R), 0)}) {
        PureState h2 = apply_1q(apply_1q(s, gate_matrix(GateKind::H), 0), gate_matrix(GateKind::H), 0);
        f.expect(h2 == s, "H^2 != I");
    }

    for (GateKind g : {GateKind::X, GateKind::R, GateKind::H, GateKind::S})
        f.expect(unitary_exact(gate_matrix(g)), std::string("gate not exactly unitary: ") + gate_name(g));
    // CNOT: an exact permutation, so involutive on the full basis
    for (size_t i = 0; i < 4; ++i) {
        PureState b = PureState::basis(2, i);
        PureState twice = apply_cnot(apply_cnot(b, 0, 1), 0, 1);
        f.expect(twice == b, "CNOT not involutive");
        f.expect(apply_cnot(b, 0, 1).norm2() == one, "CNOT does not preserve the norm");
    }
}

void criterion_exact_complexities(Failures& f) {
    const MachineSpec spec{3, Mode::CondN};
    const ConditionSpec cond{1, std::nullopt, {}};
    PureState rz = apply_1q(PureState::basis(1, size_t(0)), gate_matrix(GateKind::R), 0);

    struct Case {
        PureState target;
        long long expect;
    };
    std::vector<Case> cases = {{PureState::basis(1, size_t(0)), 4},
                               {rz, 6},
                               {PureState::basis(1, size_t(1)), 8}};

    for (const auto& c : cases) {
        KEstimate engine = k_exact(c.target, spec, cond);
        f.expect(engine.value && *engine.value == c.expect && engine.exact,
                 "k_exact != " + std::to_string(c.expect));

        // independent oracle: decode and run every bit string of length <= 8
        std::optional<long long> oracle;
        for (int len = 1; len <= 8; ++len)
            for (uint64_t v = 0; v < (uint64_t(1) << len); ++v) {
                RunResult r = run(spec, BitString::from_ordinal(len, v), cond, 64);
                auto* h = std::get_if<Halted>(&r);
                if (!h) continue;
                CodeLength pen = ceil_neg_log2(fidelity(h->output, c.target));
                if (pen.infinite) continue;
                long long value = len + pen.value;
                if (!oracle || value < *oracle) oracle = value;
            }
        f.expect(oracle.has_value() && *oracle == c.expect,
                 "oracle disagrees at " + std::to_string(c.expect));
        f.expect(oracle.has_value() && engine.value && *oracle == *engine.value,
                 "oracle and engine must agree exactly");
    }
}

void criterion_stabilization(Failures& f) {
    struct Setup {
        int n;
        int max_exact_len;
        int targets;
    };
    for (const Setup& setup : {Setup{1, 10, 100}, Setup{2, 14, 100}}) {
        MachineSpec spec{setup.n + 2, Mode::CondN};
        ConditionSpec cond{setup.n, std::nullopt, {}};
        std::vector<HaltTable> tables;
        for (int len = 4; len <= setup.max_exact_len; ++len)
            tables.push_back(dovetail(spec, cond, len));
        const HaltTable& full = tables.back();

        for (int t = 0; t < setup.targets; ++t) {
            PureState target = seeded_target(setup.n, uint64_t(t + 1));
            KEstimate exact = k_exact_with_table(target, full);
            f.expect(exact.value.has_value(), "exact value missing");

            std::optional<long long> prev;
            for (const auto& table : tables) {
                KEstimate est = k_quantum(target, table);
                if (prev && est.value)
                    f.expect(*est.value <= *prev, "k_quantum not monotone in max_len");
                f.expect(!prev || est.value.has_value() || !prev,
                         "finite estimate became infinite");
                if (est.value) prev = est.value;
                if (est.value)
                    f.expect(*est.value >= *exact.value, "table estimate below the exact value");
                if (table.max_len >= *exact.value)
                    f.expect(est.value && *est.value == *exact.value,
                             "no stabilisation at max_len >= K");
            }
        }
    }
}

void criterion_upper_bound(Failures& f) {
    for (int n : {1, 2}) {
        MachineSpec spec{n + 2, Mode::CondN};
        ConditionSpec cond{n, std::nullopt, {}};
        HaltTable table = dovetail(spec, cond, n == 1 ? 10 : 14);
        AuditReport report = audit_upper_bound(table, n);
        f.expect(report.all_pass(), "upper-bound audit failed at n=" + std::to_string(n));
    }
}

void criterion_incompressibility(Failures& f) {
    for (int n = 1; n <= 4; ++n) {
        MachineSpec spec{n + 2, Mode::CondN};
        ConditionSpec cond{n, std::nullopt, {}};
        HaltTable table = dovetail(spec, cond, 8);
        for (int delta = 0; delta <= 2 && delta <= n; ++delta) {
            AuditReport report = audit_incompressibility_classical(table, n, delta);
            f.expect(report.all_pass(), "classical counting bound failed at n=" + std::to_string(n) +
                                            " delta=" + std::to_string(delta));
        }
    }

    MachineSpec spec{4, Mode::CondN};
    ConditionSpec cond{2, std::nullopt, {}};
    HaltTable table = dovetail(spec, cond, 8);
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        auto basis = seeded_basis(2, seed);
        for (size_t i = 0; i < basis.size(); ++i)
            for (size_t j = i + 1; j < basis.size(); ++j)
                f.expect(inner_raw(basis[i], basis[j]).is_zero(), "seeded basis not orthonormal");
        for (int c : {0, 1}) {
            AuditReport report = audit_incompressibility_quantum(basis, table, 2, c);
            f.expect(report.all_pass(), "quantum counting bound failed at seed=" +
                                            std::to_string(seed) + " c=" + std::to_string(c));
        }
    }
}

void criterion_subadditivity(Failures& f) {
    for (int n = 1; n <= 3; ++n) {
        MachineSpec spec{n + 2, Mode::CondN};
        ConditionSpec cond{n, std::nullopt, {}};
        HaltTable table = dovetail(spec, cond, 9);
        for (uint64_t x = 1; x < (uint64_t(1) << n); ++x) {
            AuditReport report = subadditivity_witness(BitString::from_ordinal(n, x), table);
            f.expect(report.all_pass(),
                     "subadditivity witness failed at x=" + BitString::from_ordinal(n, x).str());
        }
    }
}

void criterion_mc(Failures& f) {
    f.expect(sample_size(4, 0.5, std::ldexp(1.0, -10)) == 300, "sample_size(4, 0.5, 2^-10) != 300");

    const MachineSpec spec{3, Mode::CondN};
    const ConditionSpec cond{1, std::nullopt, {}};
    HaltTable table = dovetail(spec, cond, 9);
    PureState target = apply_1q(PureState::basis(1, size_t(0)), gate_matrix(GateKind::R), 0);
    long long exact = *k_exact_with_table(target, table).value;
    f.expect(exact == 6, "exact reference value drifted");

    MCConfig mc;
    mc.epsilon = 0.25;
    mc.alpha = 0.01;
    int within_one_bit = 0;
    int two_sided = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        mc.seed = uint64_t(seed);
        MCResult res = mc_approximate(target, table, mc);
        if (res.est.value && *res.est.value <= exact + 1) ++within_one_bit;
        if (res.est.value && *res.est.value >= exact && *res.est.value <= exact + 1) ++two_sided;
    }
    f.expect(within_one_bit >= 97,
             "only " + std::to_string(within_one_bit) + "/100 runs within one bit");
    f.expect(two_sided >= 97, "only " + std::to_string(two_sided) + "/100 runs inside [K, K+1]");
}

void criterion_multiples_cloning(Failures& f) {
    for (int n = 1; n <= 8; ++n)
        for (int m = 1; m <= 8; ++m)
            for (long long km = 0; km <= 16; ++km) {
                MultiplesBounds b = multiples_bounds(n, m, km);
                f.expect(b.lower <= b.upper, "multiples bounds inverted");
            }

    double max_dev = 0.0;
    Int exact_binomial = 2;  // C(2,1)
    for (long long m = 1; m <= 1024; ++m) {
        double exact = log2_int(exact_binomial);
        double da = 2.0 * double(m), db = double(m);
        double asym = db * std::log2(da / db) + (da - db) * std::log2(da / (da - db)) +
                      0.5 * std::log2(da / (db * (da - db)));
        max_dev = std::max(max_dev, std::abs(exact - asym));
        // C(2m+2, m+1) = C(2m, m) * (2m+1)(2m+2) / (m+1)^2
        exact_binomial = exact_binomial * (2 * m + 1) * (2 * m + 2) / ((m + 1) * (m + 1));
    }
    f.expect(max_dev <= 2.0, "log-binomial deviation " + std::to_string(max_dev) + " exceeds 2");

    MachineSpec w6{6, Mode::CondN};
    // HALT; ROT q0; NOT q0 -- all three encoded for the W=6 machine
    for (const char* p : {"1111", "00001111", "100001111"}) {
        for (int m = 1; m <= 4; ++m) {
            AuditReport report = cloning_check(bits_of(p), 1, m, w6);
            f.expect(report.all_pass(), std::string("cloning failed for p=") + p);
            f.expect(report.artifacts["witness"] == "111011111", "cloning witness changed");
        }
    }
}

void criterion_determinism(Failures& f) {
    if (g_cli_path.empty()) {
        f.expect(false, "qk CLI path not supplied (argv[1])");
        return;
    }
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "qk_acceptance";
    fs::create_directories(dir);
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    auto shell = [&](const std::string& args) {
        std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    fs::path t1 = dir / "w1.jsonl", t8 = dir / "w8.jsonl";
    int rc1 = shell("enumerate --n 1 --max-len 12 --workers 1 --out " + t1.string());
    int rc8 = shell("enumerate --n 1 --max-len 12 --workers 8 --out " + t8.string());
    f.expect(rc1 == 0 && rc8 == 0, "enumerate runs failed");
    f.expect(slurp(t1) == slurp(t8), "tables differ between 1 and 8 workers");
    f.expect(!slurp(t1).empty(), "empty table output");

    fs::path r1 = dir / "r1.json", r2 = dir / "r2.json";
    std::string audit_args = "audit consistency --table " + t1.string() + " --out ";
    f.expect(shell(audit_args + r1.string()) == 0, "audit run failed");
    f.expect(shell(audit_args + r2.string()) == 0, "audit rerun failed");
    f.expect(slurp(r1) == slurp(r2) && !slurp(r1).empty(), "audit reports not byte-identical");

    std::ofstream(dir / "rz.json")
        << R"({"n":1,"amps":[["3/5+0/1*r2","0/1+0/1*r2"],["4/5+0/1*r2","0/1+0/1*r2"]]})";
    fs::path m1 = dir / "m1.json", m2 = dir / "m2.json";
    std::string mc_args = "mc --state " + (dir / "rz.json").string() + " --table " + t1.string() +
                          " --seed 5 --epsilon 0.25 --alpha 0.01 --out ";
    f.expect(shell(mc_args + m1.string()) == 0, "mc run failed");
    f.expect(shell(mc_args + m2.string()) == 0, "mc rerun failed");
    f.expect(slurp(m1) == slurp(m2) && !slurp(m1).empty(), "mc outputs not byte-identical");
}

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0: no limit stated
    std::function<void(Failures&)> body;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    std::vector<Criterion> criteria = {
        {1, "code laws: bar/prime lengths, round trips, prefix-freeness", 5.0, criterion_code_laws},
        {2, "Kraft and prefix-freeness over all programs of length <= 16", 30.0, criterion_kraft},
        {3, "gate algebra: S^2, H^2, exact unitarity", 0.0, criterion_gates},
        {4, "exact complexities 4/6/8 against the brute-force oracle", 10.0,
         criterion_exact_complexities},
        {5, "stabilisation and monotonicity over 200 seeded targets", 0.0, criterion_stabilization},
        {6, "upper bound K <= 2n + c_U with the fidelity mechanism", 0.0, criterion_upper_bound},
        {7, "incompressibility counts, classical and 50 seeded bases", 60.0,
         criterion_incompressibility},
        {8, "sub-additivity witness fidelities and K(y) <= K(0)+1", 0.0, criterion_subadditivity},
        {9, "MC estimator: sample size 300 and the one-bit envelope", 60.0, criterion_mc},
        {10, "multiples bounds, log-binomial deviation, 9-bit cloning", 0.0,
         criterion_multiples_cloning},
        {11, "byte-identical tables and reports across workers/reruns", 0.0, criterion_determinism},
    };

    int failed = 0;
    for (auto& criterion : criteria) {
        Failures f;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(f);
        } catch (const std::exception& e) {
            f.expect(false, std::string("exception: ") + e.what());
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.time_limit_s > 0 && elapsed > criterion.time_limit_s)
            f.expect(false, "runtime " + std::to_string(elapsed) + "s exceeds " +
                                std::to_string(criterion.time_limit_s) + "s");
        bool pass = f.messages.empty();
        if (!pass) ++failed;
        std::printf("[%s] criterion %2d: %s (%.2fs)\n", pass ? "PASS" : "FAIL", criterion.id,
                    criterion.name.c_str(), elapsed);
        for (const auto& msg : f.messages) std::printf("        - %s\n", msg.c_str());
    }
    if (failed) {
        std::printf("%d criterion(s) failed\n", failed);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
