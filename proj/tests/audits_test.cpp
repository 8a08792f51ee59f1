#include "qk/audits.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace qk;

namespace {

const MachineSpec kW3{3, Mode::CondN};
const ConditionSpec kN1{1, std::nullopt, {}};

BitString bs(const char* s) { return BitString::from_string(s); }

PureState rot_zero() {
    return PureState(1, {RingComplex(RingReal(Rational(3, 5))), RingComplex(RingReal(Rational(4, 5)))});
}

}  // namespace

TEST_CASE("upper bound audit measures c_U = 7 at n = 1", "[audits]") {
    HaltTable table = dovetail(kW3, kN1, 8);
    AuditReport report = audit_upper_bound(table, 1);
    CHECK(report.all_pass());
    CHECK(report.artifacts["c_U"] == 7);  // from K(|0>) = 4 and K(|1>) = 8
    CHECK(report.artifacts["basis_k"]["0"] == 4);
    CHECK(report.artifacts["basis_k"]["1"] == 8);

    std::ostringstream os;
    report.render(os);
    CHECK(os.str().find("PASS") != std::string::npos);
}

TEST_CASE("upper bound audit refuses not-exact-complete tables", "[audits]") {
    HaltTable small = dovetail(kW3, kN1, 5);
    CHECK_THROWS_AS(audit_upper_bound(small, 1), std::invalid_argument);
}

TEST_CASE("classical incompressibility counting bound", "[audits]") {
    HaltTable table = dovetail(kW3, kN1, 8);
    AuditReport r0 = audit_incompressibility_classical(table, 1, 0);
    CHECK(r0.all_pass());
    CHECK(r0.artifacts["count"] == 2);  // no halting program is shorter than 1 bit

    MachineSpec w4{4, Mode::CondN};
    ConditionSpec n2{2, std::nullopt, {}};
    HaltTable t2 = dovetail(w4, n2, 8);
    AuditReport r1 = audit_incompressibility_classical(t2, 2, 1);
    CHECK(r1.all_pass());
    CHECK(r1.artifacts["count"] == 4);  // bound is 3; all four strings qualify
    AuditReport r2 = audit_incompressibility_classical(t2, 2, 0);
    CHECK(r2.all_pass());
    CHECK_THROWS_AS(audit_incompressibility_classical(table, 1, 5), std::invalid_argument);
}

TEST_CASE("hard basis construction", "[audits]") {
    HaltTable t4 = dovetail(kW3, kN1, 4);  // outputs: {|0>}
    HardBasis hb = construct_hard_basis(t4, 1);
    REQUIRE(hb.basis.size() == 2);
    CHECK(hb.span_dim == 1);
    CHECK(equal_up_to_phase(hb.basis[0], PureState::basis(1, size_t(0))));
    CHECK(fidelity(hb.basis[1], PureState::basis(1, size_t(0))).is_zero());

    // empty table: canonical basis
    HaltTable empty = dovetail(kW3, kN1, 0);
    HardBasis canonical = construct_hard_basis(empty, 1);
    REQUIRE(canonical.basis.size() == 2);
    CHECK(canonical.span_dim == 0);
    CHECK(equal_up_to_phase(canonical.basis[0], PureState::basis(1, size_t(0))));
}

TEST_CASE("hard basis at n = 2 has exactly orthogonal completion vectors", "[audits]") {
    MachineSpec w4{4, Mode::CondN};
    ConditionSpec n2{2, std::nullopt, {}};
    HaltTable table = dovetail(w4, n2, 7);  // HALT and single rotations
    HardBasis hb = construct_hard_basis(table, 2);
    REQUIRE(hb.basis.size() == 4);
    auto outputs = [&] {
        std::vector<PureState> out;
        for (const auto& rec : table.records) out.push_back(rec.output);
        return out;
    }();
    for (size_t i = hb.span_dim; i < hb.basis.size(); ++i)
        for (const auto& out : outputs) CHECK(fidelity(hb.basis[i], out).is_zero());
    for (size_t i = 0; i < hb.basis.size(); ++i)
        for (size_t j = i + 1; j < hb.basis.size(); ++j)
            CHECK(inner_raw(hb.basis[i], hb.basis[j]).is_zero());
}

TEST_CASE("quantum incompressibility audit", "[audits]") {
    HaltTable table = dovetail(kW3, kN1, 8);
    std::vector<PureState> canonical = {PureState::basis(1, size_t(0)), PureState::basis(1, size_t(1))};
    AuditReport report = audit_incompressibility_quantum(canonical, table, 1, 0);
    CHECK(report.all_pass());
    CHECK(report.artifacts["count"] == 2);  // both canonical vectors have K >= 1

    // the hard-basis completion vectors count as infinitely complex
    HardBasis hb = construct_hard_basis(dovetail(kW3, kN1, 4), 1);
    AuditReport hard = audit_incompressibility_quantum(hb.basis, table, 1, 1);
    CHECK(hard.all_pass());

    std::vector<PureState> skew = {PureState::basis(1, size_t(0)), rot_zero()};
    CHECK_THROWS_AS(audit_incompressibility_quantum(skew, table, 1, 0), std::invalid_argument);
}

TEST_CASE("seeded bases are ring-exact and pass the incompressibility audit", "[audits]") {
    MachineSpec w4{4, Mode::CondN};
    ConditionSpec n2{2, std::nullopt, {}};
    HaltTable table = dovetail(w4, n2, 8);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        auto basis = seeded_basis(2, seed);
        REQUIRE(basis.size() == 4);
        for (size_t i = 0; i < 4; ++i)
            for (size_t j = i + 1; j < 4; ++j) REQUIRE(inner_raw(basis[i], basis[j]).is_zero());
        for (int c : {0, 1}) {
            AuditReport report = audit_incompressibility_quantum(basis, table, 2, c);
            CHECK(report.all_pass());
        }
    }
}

TEST_CASE("consistency audit measures zero gaps on this machine", "[audits]") {
    HaltTable table = dovetail(kW3, kN1, 8);
    AuditReport report = audit_consistency(table, 1);
    CHECK(report.all_pass());
    auto rows = report.artifacts["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["direct_min"] == 4);
    CHECK(rows[0]["k"] == 4);
    CHECK(rows[0]["gap"] == 0);
    CHECK(rows[1]["direct_min"] == 8);
    CHECK(rows[1]["k"] == 8);
    CHECK(rows[1]["gap"] == 0);

    MachineSpec w4{4, Mode::CondN};
    ConditionSpec n2{2, std::nullopt, {}};
    HaltTable t2 = dovetail(w4, n2, 12);
    AuditReport r2 = audit_consistency(t2, 2);
    CHECK(r2.all_pass());
    for (const auto& row : r2.artifacts["rows"])
        if (row["x"] == "00") CHECK(row["gap"] == 0);
}

TEST_CASE("sub-additivity witness audit", "[audits]") {
    HaltTable table = dovetail(kW3, kN1, 8);
    AuditReport report = subadditivity_witness(bs("1"), table);
    CHECK(report.all_pass());
    CHECK(report.artifacts["k_zero"] == 4);
    CHECK(report.artifacts["k_y"] == 5);  // HALT witness plus the exact 1-bit penalty

    MachineSpec w4{4, Mode::CondN};
    ConditionSpec n2{2, std::nullopt, {}};
    HaltTable t2 = dovetail(w4, n2, 8);
    AuditReport bell = subadditivity_witness(bs("11"), t2);
    CHECK(bell.all_pass());

    CHECK_THROWS_AS(subadditivity_witness(bs("00"), t2), std::invalid_argument);
}

TEST_CASE("log_binomial exact and asymptotic", "[audits]") {
    LogBinomial lb = log_binomial(4, 3);
    CHECK(lb.exact == Catch::Approx(2.0).epsilon(1e-12));
    lb = log_binomial(5, 2);
    CHECK(lb.exact == Catch::Approx(std::log2(10.0)).epsilon(1e-12));
    CHECK_THROWS_AS(log_binomial(4, 0), std::domain_error);
    CHECK_THROWS_AS(log_binomial(4, 4), std::domain_error);

    // (2m, m): deviation from the footnote formula stays bounded
    double max_dev = 0.0;
    for (long long m = 1; m <= 1024; m *= 2) {
        LogBinomial big = log_binomial(2 * m, m);
        max_dev = std::max(max_dev, std::abs(big.exact - big.asymptotic));
    }
    CHECK(max_dev <= 2.0);
}

TEST_CASE("multiples bounds", "[audits]") {
    MultiplesBounds mb = multiples_bounds(1, 3, 0);
    CHECK(mb.lower == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(mb.upper == Catch::Approx(10.0).epsilon(1e-12));

    mb = multiples_bounds(2, 2, 0);
    CHECK(mb.lower == Catch::Approx(std::log2(10.0)).epsilon(1e-12));
    CHECK(mb.upper == Catch::Approx(4.0 * std::log2(10.0) + 2.0 * std::log2(std::log2(10.0)))
                          .epsilon(1e-12));

    // m = 1: C(N, 1) = N, so the lower bound is exactly n
    for (int n = 1; n <= 6; ++n) CHECK(multiples_bounds(n, 1, 0).lower == Catch::Approx(double(n)));

    for (int n = 1; n <= 8; ++n)
        for (int m = 1; m <= 8; ++m)
            for (long long km : {0LL, 7LL, 16LL}) {
                MultiplesBounds b = multiples_bounds(n, m, km);
                CHECK(b.lower <= b.upper);
            }
}

TEST_CASE("cloning check reproduces tensor powers with the 9-bit witness", "[audits]") {
    AuditReport r1 = cloning_check(bs("1111"), 1, 3, kW3);
    CHECK(r1.all_pass());
    CHECK(r1.artifacts["witness"] == "111011111");

    AuditReport r2 = cloning_check(bs("0001111"), 1, 2, kW3);
    CHECK(r2.all_pass());

    // NOT q0; HALT on the W=6 machine: "10" + "000" + "1111"
    MachineSpec w6{6, Mode::CondN};
    AuditReport r3 = cloning_check(bs("100001111"), 1, 4, w6);
    CHECK(r3.all_pass());

    CHECK_THROWS_AS(cloning_check(bs("1111"), 1, 4, kW3), std::invalid_argument);
    CHECK_THROWS_AS(cloning_check(bs("11110"), 1, 2, kW3), std::invalid_argument);
}

TEST_CASE("invariance gap between workspace variants", "[audits]") {
    std::vector<PureState> corpus = {PureState::basis(1, size_t(0)), PureState::basis(1, size_t(1)),
                                     rot_zero()};
    AuditReport same = invariance_gap(kW3, kW3, corpus, 1);
    CHECK(same.all_pass());
    CHECK(same.artifacts["gap"] == 0);

    MachineSpec w4{4, Mode::CondN};
    AuditReport diff = invariance_gap(kW3, w4, corpus, 1);
    CHECK(diff.all_pass());
    CHECK(diff.artifacts["gap"].get<long long>() >= 0);

    CHECK_THROWS_AS(invariance_gap(kW3, w4, {}, 1), std::invalid_argument);
}

TEST_CASE("restricted sub-additivity over directly computable pairs", "[audits]") {
    HaltTable table_n = dovetail(kW3, kN1, 8);
    MachineSpec w4{4, Mode::CondN};
    ConditionSpec n2{2, std::nullopt, {}};
    HaltTable table_2n = dovetail(w4, n2, 14);
    AuditReport report = subadditive_restricted_audit(table_n, table_2n);
    CHECK(report.all_pass());
    CHECK(report.parameters["pairs_checked"].get<long long>() > 0);
    // concatenating HALT-stripped witnesses never costs more than re-encoding
    CHECK(report.artifacts["c_concat"].get<long long>() <= 8);
}

TEST_CASE("audit reports serialise with verdicts", "[audits]") {
    HaltTable table = dovetail(kW3, kN1, 8);
    AuditReport report = audit_consistency(table, 1);
    auto j = report.to_json();
    CHECK(j["name"] == "consistency");
    CHECK(j["pass"] == true);
    REQUIRE(j["checks"].is_array());
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("claim"));
        CHECK(c.contains("pass"));
    }
}
