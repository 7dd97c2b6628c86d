#include "doctest.h"

#include "qwspec/random.hpp"

using namespace qwspec;

namespace {
const double s2 = 1.0 / std::sqrt(2.0);
UnitaryCoin hadamard() { return UnitaryCoin(s2, s2, -s2, s2); }
}

TEST_CASE("coin_at: constant tails and overrides") {
    CoinField hom = CoinField::homogeneous(hadamard());
    CHECK(hom.coin_at(5) == hadamard());
    CHECK(hom.coin_at(-40) == hadamard());

    UnitaryCoin c0 = UnitaryCoin::su2(s2, cd(0, s2));
    UnitaryCoin cp = hadamard(), cm = UnitaryCoin();
    CoinField tp = CoinField::two_phase(c0, cp, cm);
    CHECK(tp.coin_at(0) == c0);
    CHECK(tp.coin_at(-3) == cm);
    CHECK(tp.coin_at(7) == cp);
    CHECK(tp.n_plus() == 1);
    CHECK(tp.n_minus() == 1);
}

TEST_CASE("coin_at: window gaps fall back to the tail on that side") {
    Rng rng(3);
    UnitaryCoin l = rng.coin(), r = rng.coin(), o = rng.coin();
    CoinField f(l, r, {{-4, o}, {3, o}});
    CHECK(f.n_minus() == 5);
    CHECK(f.n_plus() == 4);
    CHECK(f.coin_at(-2) == l);
    CHECK(f.coin_at(0) == r);
    CHECK(f.coin_at(2) == r);
    CHECK(f.coin_at(-4) == o);
    CHECK(f.coin_at(3) == o);
    CHECK(f.coin_at(-5) == l);
}

TEST_CASE("site_projectors: closed values") {
    SiteProjectors id = site_projectors(UnitaryCoin());
    CHECK(maxabs(Mat2(id.zL - pi_L())) == 0.0);
    CHECK(maxabs(Mat2(id.zR - pi_R())) == 0.0);

    SiteProjectors h = site_projectors(hadamard());
    Mat2 zl, zr;
    zl << 1, 0, 1, 0;
    zr << 0, -1, 0, 1;
    CHECK(maxabs(Mat2(h.zL - zl)) < 1e-15);
    CHECK(maxabs(Mat2(h.zR - zr)) < 1e-15);
}

TEST_CASE("site_projectors: structure on random coins") {
    Rng rng(11);
    for (int k = 0; k < 100; ++k) {
        SiteProjectors z = site_projectors(rng.coin());
        CHECK(z.zL(0, 1) == cd(0));
        CHECK(z.zL(1, 1) == cd(0));
        CHECK(z.zR(0, 0) == cd(0));
        CHECK(z.zR(1, 0) == cd(0));
        CHECK(maxabs(Mat2(z.zL + z.zR.adjoint() - Mat2::Identity())) < 1e-12);
        CHECK(maxabs(Mat2(z.zL.adjoint() + z.zR - Mat2::Identity())) < 1e-12);
    }
}

TEST_CASE("UnitaryCoin rejects a = 0 and non-unitary input") {
    CHECK_THROWS_AS(UnitaryCoin(0, 1, 1, 0), InvalidCoin);
    CHECK_THROWS_AS(UnitaryCoin(1.1, 0, 0, 1), InvalidCoin);
    CHECK_NOTHROW(UnitaryCoin(cd(0, 1), 0, 0, 1));
}

TEST_CASE("validate_field reports offending sites") {
    RawCoinField raw;
    CHECK(validate_field(raw).accepted);

    RawCoinField bad_a;
    bad_a.overrides[2] << 0, 1, 1, 0;
    ValidationReport r1 = validate_field(bad_a);
    CHECK_FALSE(r1.accepted);
    REQUIRE(r1.issues.size() == 1);
    CHECK(r1.issues[0].site == 2);
    CHECK(r1.min_abs_a == 0.0);

    RawCoinField bad_u;
    bad_u.overrides[-1] << 1.1, 0, 0, 1;  // first row norm 1.1
    ValidationReport r2 = validate_field(bad_u);
    CHECK_FALSE(r2.accepted);
    REQUIRE(r2.issues.size() == 1);
    CHECK(r2.issues[0].site == -1);
    CHECK(r2.max_unitarity_residual > 0.2);
    CHECK_THROWS_AS(CoinField::from_raw(bad_u), InvalidCoin);
}

TEST_CASE("re-orthonormalisation happens only on request") {
    RawCoinField raw;
    raw.right_tail << s2 * (1 + 1e-9), s2, -s2, s2;
    CHECK_THROWS_AS(CoinField::from_raw(raw), InvalidCoin);
    CoinField f = CoinField::from_raw(raw, true);
    CHECK(UnitaryCoin::unitarity_residual(f.right_tail().matrix()) < 1e-14);
}

TEST_CASE("random coins are unitary with |a| >= 1e-3") {
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        UnitaryCoin c = rng.coin();
        CHECK(UnitaryCoin::unitarity_residual(c.matrix()) < 1e-13);
        CHECK(std::abs(c.a()) >= 1e-3);
        CHECK(std::abs(std::abs(c.delta()) - 1.0) < 1e-12);
    }
}

TEST_CASE("homogeneity detection") {
    CHECK(CoinField::homogeneous(hadamard()).is_homogeneous());
    CHECK_FALSE(CoinField::two_phase(UnitaryCoin(), hadamard(), hadamard()).is_homogeneous());
    CHECK(CoinField(hadamard(), hadamard(), {{0, hadamard()}}).is_homogeneous());
}
