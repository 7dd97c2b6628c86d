#include "doctest.h"

#include "qwspec/random.hpp"
#include "qwspec/spectral.hpp"

using namespace qwspec;

namespace {
const double s2 = 1.0 / std::sqrt(2.0);
UnitaryCoin hadamard() { return UnitaryCoin(s2, s2, -s2, s2); }
CoinField identity_field() { return CoinField::homogeneous(UnitaryCoin()); }
CoinField hadamard_field() { return CoinField::homogeneous(hadamard()); }
UnitaryCoin example_c0() { return UnitaryCoin::su2(s2, cd(0, s2)); }
CoinField two_phase_example() { return CoinField::two_phase(example_c0(), hadamard(), hadamard()); }

double angle_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2 * kPi);
    return std::min(d, 2 * kPi - d);
}

// random SU(2) coin with |α| in [lo, hi]
UnitaryCoin random_su2(Rng& rng, double lo, double hi) {
    double r = rng.uniform(lo, hi);
    return UnitaryCoin::su2(std::polar(r, rng.uniform(0, 2 * kPi)),
                            std::polar(std::sqrt(1 - r * r), rng.uniform(0, 2 * kPi)));
}

StateVector random_state(Rng& rng, int radius) {
    StateVector f;
    for (int x = -radius; x <= radius; ++x)
        if (rng.uniform() < 0.7) f.set(x, rng.gaussian_vec());
    if (f.empty()) f.set(0, rng.gaussian_vec());
    return f;
}
}

TEST_CASE("arc_nodes: square-root endpoint behaviour is integrated spectrally") {
    const double lo = 0.3, hi = 2.1;
    auto nodes = arc_nodes(lo, hi, 64);
    double wsum = 0.0, inv = 0.0, sq = 0.0;
    for (auto [t, w] : nodes) {
        double q = (t - lo) * (hi - t);
        wsum += w;
        inv += w * 2 * kPi / std::sqrt(q);
        sq += w * 2 * kPi * std::sqrt(q);
    }
    CHECK(std::abs(wsum - (hi - lo) / (2 * kPi)) < 1e-3);  // smooth integrands: second order only
    CHECK(std::abs(inv - kPi) < 1e-13);
    CHECK(std::abs(sq - kPi * (hi - lo) * (hi - lo) / 8) < 1e-13);
}

TEST_CASE("exact_moment_oracle: closed values") {
    CHECK(maxabs(exact_moment_oracle(hadamard_field(), 0) - Mat2::Identity()) == 0.0);
    CHECK(maxabs(exact_moment_oracle(identity_field(), 1)) == 0.0);
    CHECK(maxabs(exact_moment_oracle(identity_field(), -3)) == 0.0);
    // Hadamard, two steps by hand: U²δ₀e_L at 0 picks up the (L→R→L) and (R-bounce) paths
    Mat2 m2 = exact_moment_oracle(hadamard_field(), 2);
    Mat2 expect;
    expect << -0.5, 0.5, -0.5, -0.5;
    CHECK(maxabs(m2 - expect) < 1e-15);
    // U* moments are adjoints
    Rng rng(7);
    for (int i = 0; i < 5; ++i) {
        CoinField f = rng.field();
        for (int n = 1; n <= 6; ++n)
            CHECK(maxabs(exact_moment_oracle(f, -n) - exact_moment_oracle(f, n).adjoint()) < 1e-13);
    }
}

TEST_CASE("homogeneous closed form") {
    const UnitaryCoin h = hadamard();
    // (1,1) entry √2 at θ = π/2
    CHECK(std::abs(homogeneous_density(h, kPi / 2)(0, 0) - std::sqrt(2.0)) < 1e-14);
    CHECK(maxabs(homogeneous_density(h, 0.1)) == 0.0);  // outside |Re ζ| ≤ |α|
    CHECK_THROWS_AS(homogeneous_measure(UnitaryCoin(s2, s2, s2, -s2)), InvalidCoin);

    SpectralMeasure m = homogeneous_measure(h, 50000);
    CHECK(maxabs(m.total_mass() - Mat2::Identity()) < 1e-6);
    CHECK(m.min_eigenvalue() >= -1e-9);
    MomentSequence mom = moments(m, 20);
    double worst = 0.0;
    for (int n = -20; n <= 20; ++n)
        worst = std::max(worst, maxabs(mom[n] - exact_moment_oracle(hadamard_field(), n)));
    CHECK(worst < 1e-6);

    // pure shift: Lebesgue measure times I
    SpectralMeasure id = homogeneous_measure(UnitaryCoin(), 64);
    CHECK(maxabs(id.total_mass() - Mat2::Identity()) < 1e-14);
    MomentSequence idm = moments(id, 5);
    for (int n = 1; n <= 5; ++n) CHECK(maxabs(idm[n]) < 1e-14);

    // random SU(2) coins
    Rng rng(11);
    for (int i = 0; i < 6; ++i) {
        UnitaryCoin c = random_su2(rng, 0.15, 0.95);
        SpectralMeasure mc = homogeneous_measure(c, 20000);
        CoinField fc = CoinField::homogeneous(c);
        CHECK(maxabs(mc.total_mass() - Mat2::Identity()) < 1e-6);
        MomentSequence mm = moments(mc, 12);
        double w = 0.0;
        for (int n = -12; n <= 12; ++n) w = std::max(w, maxabs(mm[n] - exact_moment_oracle(fc, n)));
        CHECK(w < 1e-6);
    }
}

TEST_CASE("two-phase closed form: assumption gate") {
    const UnitaryCoin h = hadamard();
    CHECK_NOTHROW(TwoPhaseModel(example_c0(), h, h));
    CHECK_THROWS_AS(TwoPhaseModel(UnitaryCoin(s2, s2, s2, -s2), h, h), AssumptionViolation);
    CHECK_THROWS_AS(TwoPhaseModel(example_c0(), h, UnitaryCoin::su2(s2, cd(0, s2))), AssumptionViolation);
    CHECK_THROWS_AS(TwoPhaseModel(example_c0(), h, UnitaryCoin::su2(0.6, 0.8)), AssumptionViolation);
    CHECK_THROWS_AS(TwoPhaseModel(example_c0(), UnitaryCoin(), UnitaryCoin()), AssumptionViolation);
    // s = Re(β₀β̄) = |β|² violates |s| < |β|²
    CHECK_THROWS_AS(TwoPhaseModel(h, h, h), AssumptionViolation);
    try {
        TwoPhaseModel(h, h, h);
    } catch (const AssumptionViolation& e) {
        CHECK(std::string(e.what()).find("|s| < |beta|^2") != std::string::npos);
    }
    // field-level detection
    CHECK_NOTHROW(TwoPhaseModel::from_field(two_phase_example()));
    CHECK_THROWS_AS(TwoPhaseModel::from_field(CoinField(h, h, {{1, example_c0()}})), AssumptionViolation);
}

TEST_CASE("two-phase closed form: example configuration") {
    TwoPhaseModel tp(example_c0(), hadamard(), hadamard());
    CHECK(std::abs(tp.rho() - s2) < 1e-15);
    CHECK(std::abs(tp.s()) < 1e-15);
    CHECK(std::abs(tp.t() - 0.5) < 1e-15);
    CHECK(std::abs(tp.x_star() - 0.8164966) < 1e-7);
    CHECK(std::abs(tp.x_star() - std::sqrt(2.0 / 3.0)) < 1e-15);

    auto masses = tp.masses();
    Mat2 m1;
    const double off = std::sqrt(2.0) / 12, d = 1.0 / (6 * std::sqrt(2.0));
    m1 << 1.0 / 6 + d, cd(0, -off), cd(0, off), 1.0 / 6 - d;
    CHECK(maxabs(masses[0].mass - m1) < 1e-12);
    for (const auto& pm : masses) {
        CHECK(min_eigenvalue(pm.mass) >= -1e-12);
        CHECK(rank_one_defect(pm.mass) < 1e-8);
        CHECK(std::abs(tp.eigen_function(pm.zeta())) < 1e-8);
    }
    // residue form at the upper-half-plane eigenvalues
    CHECK(maxabs(tp.residue_mass(masses[0].zeta()) - masses[0].mass) < 1e-10);
    CHECK(maxabs(tp.residue_mass(masses[3].zeta()) - masses[3].mass) < 1e-10);

    SpectralMeasure m = tp.measure(50000);
    CHECK(maxabs(m.total_mass() - Mat2::Identity()) < 1e-6);
    CHECK(m.min_eigenvalue() >= -1e-9);
    CoinField f = two_phase_example();
    MomentSequence mom = moments(m, 20);
    double worst = 0.0;
    for (int n = -20; n <= 20; ++n) worst = std::max(worst, maxabs(mom[n] - exact_moment_oracle(f, n)));
    CHECK(worst < 1e-5);
}

TEST_CASE("two-phase closed form: random admissible configurations") {
    Rng rng(23);
    int done = 0;
    for (int i = 0; i < 40 && done < 6; ++i) {
        double r = rng.uniform(0.3, 0.9);
        cd beta = std::polar(std::sqrt(1 - r * r), rng.uniform(0, 2 * kPi));
        UnitaryCoin plus = UnitaryCoin::su2(std::polar(r, rng.uniform(0, 2 * kPi)), beta);
        UnitaryCoin minus = UnitaryCoin::su2(std::polar(r, rng.uniform(0, 2 * kPi)), beta);
        UnitaryCoin c0 = random_su2(rng, 0.1, 0.95);
        try {
            TwoPhaseModel tp(c0, plus, minus);
            ++done;
            CoinField f = CoinField::two_phase(c0, plus, minus);
            MomentSequence mom = moments(tp.measure(20000), 10);
            double worst = 0.0;
            for (int n = -10; n <= 10; ++n) worst = std::max(worst, maxabs(mom[n] - exact_moment_oracle(f, n)));
            CHECK(worst < 1e-5);
        } catch (const AssumptionViolation&) {
        }
    }
    CHECK(done >= 3);
}

TEST_CASE("closed_form_measure dispatch") {
    CHECK(closed_form_measure(hadamard_field(), 100).has_value());
    CHECK(closed_form_measure(two_phase_example(), 100).has_value());
    CHECK_FALSE(closed_form_measure(CoinField::homogeneous(UnitaryCoin(s2, s2, s2, -s2)), 100).has_value());
    Rng rng(3);
    CHECK_FALSE(closed_form_measure(rng.field(), 100).has_value());
}

TEST_CASE("radial limits reproduce the closed forms") {
    const int n = 512;
    {
        auto samples = ac_density(hadamard_field(), n);
        double worst = 0.0;
        for (const auto& s : samples) {
            double x = std::abs(std::cos(s.theta));
            if (std::abs(x - s2) < 0.05) continue;
            CHECK_FALSE(s.near_point_mass);
            worst = std::max(worst, maxabs(s.density - homogeneous_density(hadamard(), s.theta)));
        }
        CHECK(worst < 1e-3);
    }
    {
        TwoPhaseModel tp = TwoPhaseModel::from_field(two_phase_example());
        auto samples = ac_density(two_phase_example(), n);
        double worst = 0.0;
        int unconverged_far = 0;
        for (const auto& s : samples) {
            double x = std::abs(std::cos(s.theta));
            if (std::abs(x - s2) < 0.05) continue;
            bool near_atom = false;
            for (const auto& pm : tp.masses()) near_atom |= angle_gap(s.theta, pm.theta) < 0.05;
            if (near_atom) continue;
            if (!s.converged) ++unconverged_far;
            worst = std::max(worst, maxabs(s.density - tp.density(s.theta)));
        }
        CHECK(worst < 1e-3);
        CHECK(unconverged_far == 0);
    }
    // a sample on top of an eigenvalue is flagged
    TwoPhaseModel tp = TwoPhaseModel::from_field(two_phase_example());
    RadialSample on = radial_density(two_phase_example(), tp.masses()[0].theta);
    CHECK(on.near_point_mass);
    CHECK_FALSE(on.converged);
}

TEST_CASE("point masses: scan, refinement and estimator") {
    CoinField f = two_phase_example();
    TwoPhaseModel tp = TwoPhaseModel::from_field(f);
    auto cand = eigenvalue_candidates(f, 2048);
    REQUIRE(cand.size() == 4);
    auto est = point_masses(f, cand);
    REQUIRE(est.size() == 4);
    for (const auto& pm : tp.masses()) {
        bool found = false;
        for (const auto& e : est) {
            if (angle_gap(e.theta, pm.theta) > 1e-9) continue;
            found = true;
            CHECK(maxabs(e.mass - pm.mass) < 1e-5);
            CHECK(min_eigenvalue(e.mass) >= -1e-9);
            CHECK(rank_one_defect(e.mass) < 1e-6);
        }
        CHECK(found);
    }

    // no eigenvalues for constant coins
    CHECK(eigenvalue_candidates(hadamard_field(), 1024).empty());
    Rng rng(5);
    for (int i = 0; i < 4; ++i) {
        CoinField h = CoinField::homogeneous(random_su2(rng, 0.2, 0.9));
        auto pm = point_masses(h, eigenvalue_candidates(h, 1024));
        for (const auto& p : pm) CHECK(max_eigenvalue(p.mass) <= 1e-10);
        // the estimator at an arbitrary gap angle sees no mass either
        for (double t : {0.05, 3.1}) CHECK(max_eigenvalue(point_mass_estimate(h, t)) < 1e-10);
    }
}

TEST_CASE("reconstructed measure of a generic field") {
    Rng rng(31);
    RadialOptions opt;
    // fields with small |a| carry resonances narrower than any fixed node set resolves
    auto conditioned = [&rng] {
        for (;;) {
            CoinField f = rng.field(2);
            bool ok = std::abs(f.left_tail().a()) >= 0.4 && std::abs(f.right_tail().a()) >= 0.4;
            for (const auto& [x, c] : f.overrides()) ok = ok && std::abs(c.a()) >= 0.4;
            if (ok) return f;
        }
    };
    for (int i = 0; i < 3; ++i) {
        CoinField f = conditioned();
        SpectralMeasure m = reconstruct_measure(f, 4096, opt);
        CHECK(m.min_eigenvalue() >= -1e-9);
        // samples within ~ε_min of a band edge are smoothed by the Poisson kernel
        CHECK(maxabs(m.total_mass() - Mat2::Identity()) < 5e-3);
        MomentSequence mom = moments(m, 4);
        for (int n = 1; n <= 4; ++n) CHECK(maxabs(mom[n] - exact_moment_oracle(f, n)) < 5e-3);
    }
}

TEST_CASE("expansion theorem checks") {
    StateVector eL = StateVector::delta(0, e_L());
    SpectralMeasure hm = homogeneous_measure(hadamard(), 50000);
    SpectralMeasure idm = homogeneous_measure(UnitaryCoin(), 2048);
    SpectralMeasure tpm = TwoPhaseModel::from_field(two_phase_example()).measure(50000);

    // trivial cases
    CHECK(parseval_check(hadamard_field(), hm, eL, eL) < 1e-9);
    CHECK(parseval_check(two_phase_example(), tpm, eL, eL) < 1e-9);
    CHECK(inversion_check(hadamard_field(), hm, StateVector::delta(0, Vec2(0.3, cd(0, 1))), 0) < 1e-9);
    CHECK(resolvent_representation_check(identity_field(), idm, eL, eL, 0.5) < 1e-12);
    CHECK(resolvent_representation_check(hadamard_field(), hm, eL, eL, 0.5) < 1e-6);
    CHECK(resolvent_representation_check(two_phase_example(), tpm, eL, eL, std::polar(0.4, kPi / 6)) < 1e-5);

    Rng rng(41);
    for (int i = 0; i < 5; ++i) {
        StateVector f = random_state(rng, 4), g = random_state(rng, 4);
        CHECK(parseval_check(hadamard_field(), hm, f, g) < 1e-6);
        CHECK(parseval_check(two_phase_example(), tpm, f, g) < 1e-5);
        for (Site x = -6; x <= 6; ++x) CHECK(inversion_check(hadamard_field(), hm, f, x) < 1e-6);
        for (Site x = -5; x <= 5; ++x) CHECK(inversion_check(two_phase_example(), tpm, f, x) < 1e-5);
        cd lam = rng.lambda_two_bands(0.2, 0.7, 1.4, 4.0);
        CHECK(resolvent_representation_check(hadamard_field(), hm, f, g, lam) < 1e-6);
        CHECK(resolvent_representation_check(two_phase_example(), tpm, f, g, lam) < 1e-5);
    }
    CHECK(inversion_check(two_phase_example(), tpm, StateVector::delta(1, e_R()), 1) < 1e-5);
}

TEST_CASE("spectrum_support") {
    SupportDescription id = spectrum_support(homogeneous_measure(UnitaryCoin(), 256));
    REQUIRE(id.arcs.size() == 1);
    CHECK(id.arcs[0].lo == 0.0);
    CHECK(id.arcs[0].hi == doctest::Approx(2 * kPi));
    CHECK(id.eigen_angles.empty());

    SupportDescription h = spectrum_support(homogeneous_measure(hadamard(), 2000));
    REQUIRE(h.arcs.size() == 2);
    CHECK(h.arcs[0].lo == doctest::Approx(kPi / 4));
    CHECK(h.arcs[0].hi == doctest::Approx(3 * kPi / 4));
    CHECK(h.arcs[1].lo == doctest::Approx(5 * kPi / 4));
    CHECK(h.eigen_angles.empty());

    TwoPhaseModel tp = TwoPhaseModel::from_field(two_phase_example());
    SupportDescription t = spectrum_support(tp.measure(2000));
    CHECK(t.arcs.size() == 2);
    REQUIRE(t.eigen_angles.size() == 4);

    // eigenprojection of δ₀⊗e_L onto the eigenvalue ζ_* satisfies Uψ = ζ_*ψ near the origin
    CoinField f = two_phase_example();
    PointMass pm = tp.masses()[0];
    StateVector psi;
    for (Site x = -12; x <= 12; ++x) psi.set(x, eigenprojection(f, pm, StateVector::delta(0, e_L()), x));
    StateVector upsi = apply_walk(f, psi);
    for (Site x = -10; x <= 10; ++x) CHECK((upsi.at(x) - pm.zeta() * psi.at(x)).norm() < 1e-12);
    CHECK(psi.at(0).norm() > 0.1);
}

TEST_CASE("eigenfunction decay at the two-phase eigenvalues") {
    CoinField f = two_phase_example();
    TwoPhaseModel tp = TwoPhaseModel::from_field(f);
    for (const auto& pm : tp.masses()) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(pm.mass);
        Vec2 v = es.eigenvectors().col(1);
        EigenfunctionDecay d = eigenfunction_decay(f, pm.theta, v, 30);
        CHECK(d.alignment < 1e-8);
        CHECK(d.monotone_plus);
        CHECK(d.monotone_minus);
        CHECK(d.ratio_plus < 1e-3);
        CHECK(d.ratio_minus < 1e-3);
    }
    // a direction off the range is not an eigenvector
    EigenfunctionDecay bad = eigenfunction_decay(f, tp.masses()[0].theta, Vec2(1, 0), 30);
    CHECK(bad.alignment > 1e-3);
}

TEST_CASE("Herglotz forms") {
    Rng rng(59);
    SpectralMeasure hm = homogeneous_measure(hadamard(), 50000);
    for (int i = 0; i < 5; ++i) {
        StateVector f = random_state(rng, 3);
        cd lam = rng.lambda(0.2, 0.8);
        double n2 = f.norm() * f.norm();
        CHECK(std::abs(herglotz_form(hadamard_field(), lam, f) - herglotz_from_measure(hadamard_field(), hm, lam, f)) <
              1e-6 * n2);
        CHECK(std::real(herglotz_form(hadamard_field(), lam, f)) > 0.0);
    }
    for (int i = 0; i < 10; ++i) {
        CoinField fld = rng.field(2);
        StateVector f = random_state(rng, 3);
        double n2 = std::max(1.0, f.norm() * f.norm());
        // h_f from the finite sums equals H_f − 2λ⟨x₀f̂(λ), f̂(λ*)⟩ off the circle
        cd lam = rng.lambda_two_bands(0.3, 0.8, 1.3, 3.0);
        ResolventData rd = x0_via_directions(fld, lam);
        cd expect = herglotz_form(fld, lam, f) -
                    2.0 * lam * fourier_direct(fld, f, reflect(lam)).dot(rd.x0 * fourier_direct(fld, f, lam));
        CHECK(std::abs(h_form(fld, lam, f) - expect) < 1e-9 * n2 * std::max(1.0, maxabs(rd.x0)) * 10);
        // on the circle: Re h_f(ζ) = ‖f̂(ζ)‖²
        cd z = std::polar(1.0, rng.uniform(0, 2 * kPi));
        double fh = fourier_direct(fld, f, z).squaredNorm();
        CHECK(std::abs(std::real(h_form(fld, z, f)) - fh) < 1e-10 * std::max(1.0, fh));
    }
}
