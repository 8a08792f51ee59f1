#include "qk/ring.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qk;

namespace {
RingReal rr(long long an, long long ad, long long bn, long long bd) {
    return RingReal(Rational(an, ad), Rational(bn, bd));
}
}  // namespace

TEST_CASE("ring arithmetic is exact and closed", "[ring]") {
    RingReal x = rr(1, 2, 3, 4);   // 1/2 + 3/4 r2
    RingReal y = rr(-2, 3, 1, 5);  // -2/3 + 1/5 r2

    CHECK(x + y == rr(-1, 6, 19, 20));
    CHECK(x - y == rr(7, 6, 11, 20));
    // (1/2 + 3/4 r2)(-2/3 + 1/5 r2) = -1/3 + 3/10 + (1/10 - 1/2) r2
    CHECK(x * y == rr(-1, 30, -2, 5));
    CHECK((x / y) * y == x);
    CHECK_THROWS_AS(x / RingReal(), std::domain_error);
}

TEST_CASE("sign determination handles mixed-sign coefficients", "[ring]") {
    CHECK(RingReal().sign() == 0);
    CHECK(rr(3, 1, 0, 1).sign() == 1);
    CHECK(rr(-3, 1, 0, 1).sign() == -1);
    CHECK(rr(0, 1, 1, 2).sign() == 1);
    CHECK(rr(0, 1, -1, 2).sign() == -1);
    // 3 - 2 r2 < 0 (since 9 < 8 is false): 3 - 2*1.414 = 0.17 > 0
    CHECK(rr(3, 1, -2, 1).sign() == 1);
    // 1 - r2 < 0
    CHECK(rr(1, 1, -1, 1).sign() == -1);
    // -1 + r2 > 0
    CHECK(rr(-1, 1, 1, 1).sign() == 1);
    // -3 + 2 r2 < 0
    CHECK(rr(-3, 1, 2, 1).sign() == -1);
    CHECK(rr(1, 1, -1, 1) < RingReal());
    CHECK(RingReal(Rational(9, 25)) >= RingReal(Rational(1, 4)));
    CHECK(RingReal(Rational(9, 25)) < RingReal(Rational(1, 2)));
}

TEST_CASE("ring literals round-trip in canonical lowest terms", "[ring]") {
    CHECK(RingReal(Rational(9, 25)).str() == "9/25+0/1*r2");
    CHECK(rr(-4, 5, 0, 1).str() == "-4/5+0/1*r2");
    CHECK(RingReal::inv_sqrt2().str() == "0/1+1/2*r2");
    CHECK(parse_ring_real("9/25+0/1*r2") == RingReal(Rational(9, 25)));
    CHECK(parse_ring_real("-4/5+-1/2*r2") == rr(-4, 5, -1, 2));
    CHECK(parse_ring_real(rr(7, 3, -22, 7).str()) == rr(7, 3, -22, 7));
    CHECK_THROWS_AS(parse_ring_real("1/2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_ring_real("a/b+c/d*r2"), std::invalid_argument);
}

TEST_CASE("ring square roots", "[ring]") {
    auto s2 = ring_sqrt(RingReal(Rational(2)));
    REQUIRE(s2.has_value());
    CHECK(*s2 == RingReal::sqrt2());

    auto half = ring_sqrt(RingReal(Rational(1, 2)));
    REQUIRE(half.has_value());
    CHECK(*half == RingReal::inv_sqrt2());

    auto r = ring_sqrt(RingReal(Rational(9, 25)));
    REQUIRE(r.has_value());
    CHECK(*r == RingReal(Rational(3, 5)));

    // (1 + r2)^2 = 3 + 2 r2
    auto q = ring_sqrt(rr(3, 1, 2, 1));
    REQUIRE(q.has_value());
    CHECK(*q == rr(1, 1, 1, 1));

    CHECK_FALSE(ring_sqrt(RingReal(Rational(34))).has_value());
    CHECK_FALSE(ring_sqrt(RingReal(Rational(3))).has_value());
    CHECK_FALSE(ring_sqrt(rr(-1, 1, 0, 1)).has_value());
    CHECK(ring_sqrt(RingReal())->is_zero());
}

TEST_CASE("complex ring values", "[ring]") {
    RingComplex z(rr(3, 5, 0, 1), rr(4, 5, 0, 1));
    CHECK(z.norm2() == RingReal(Rational(1)));
    CHECK(z.conj().norm2() == RingReal(Rational(1)));
    RingComplex w(RingReal::inv_sqrt2(), RingReal::inv_sqrt2());
    CHECK(w.norm2() == RingReal(Rational(1)));
    CHECK((z * w).norm2() == RingReal(Rational(1)));
    CHECK((z - z).is_zero());
}
