#include "qwspec/acceptance.hpp"

#include "qwspec/random.hpp"

#include <chrono>
#include <map>
#include <cstdio>

namespace qwspec {

namespace {

const double s2 = 1.0 / std::sqrt(2.0);

UnitaryCoin hadamard() { return UnitaryCoin(s2, s2, -s2, s2); }
CoinField hadamard_field() { return CoinField::homogeneous(hadamard()); }
CoinField two_phase_example() {
    return CoinField::two_phase(UnitaryCoin::su2(s2, cd(0, s2)), hadamard(), hadamard());
}

double max_entry(const StateVector& f) {
    double m = 0.0;
    for (const auto& [x, v] : f.entries()) {
        (void)x;
        m = std::max(m, v.cwiseAbs().maxCoeff());
    }
    return m;
}

double angle_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2 * kPi);
    return std::min(d, 2 * kPi - d);
}

StateVector sparse_state(Rng& rng, int radius) {
    StateVector f;
    for (int x = -radius; x <= radius; ++x)
        if (rng.uniform() < 0.7) f.set(x, rng.gaussian_vec());
    if (f.empty()) f.set(0, rng.gaussian_vec());
    return f;
}

// ---------------------------------------------------------------- criteria

void identity_suite_criterion(Rng& rng, CriterionResult& r) {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        CoinField f = rng.field();
        for (int j = 0; j < 20; ++j) {
            cd lam = rng.lambda(0.2, 5.0);
            for (Site x = -4; x <= 4; ++x) worst = std::max(worst, identity_suite(f, x, lam).max());
        }
    }
    r.checks.push_back({"max relative residual (100 fields x 20 lambda x 9 sites)", worst, 1e-12});
}

void solver_criterion(Rng& rng, CriterionResult& r) {
    double inh = 0.0, conj = 0.0, left = 0.0, left_raw = 0.0, defect = 0.0;
    for (int k = 0; k < 50; ++k) {
        CoinField g = rng.field();
        cd lam = rng.lambda(0.2, 5.0);
        StateVector f = rng.state(rng.integer(1, 8));
        Vec2 w = rng.gaussian_vec();
        Window win{-12, 12};
        inh = std::max(inh, eigen_residual(g, lam, solve_inhomogeneous(g, lam, f, w, win), f));
        conj = std::max(conj, conjugate_residual(g, lam, conjugate_solver(g, lam, f, w, win), f));

        // W sums kernel terms that can reach |F|^2 ~ 1e13 and cancel down to f; measure the
        // error against the magnitude of those terms (max_x sum_y |w(x,y)| |g(y)|)
        StateVector ulf = apply_walk(g, f) - f * lam;
        StateVector back = left_inverse(g, lam, ulf);
        PropagatorCocycle Fs(g, reflect(lam));
        std::map<Site, double> mag;
        for (const auto& [y, gy] : ulf.entries())
            for (Site x = std::min<Site>(0, y); x <= std::max<Site>(0, y); ++x)
                mag[x] += w_kernel(Fs, x, y).norm() * gy.norm();
        double lsc = f.norm();
        for (const auto& [x, m] : mag) { (void)x; lsc = std::max(lsc, m); }
        left = std::max(left, max_entry(back - f) / lsc);
        left_raw = std::max(left_raw, max_entry(back - f) / f.norm());

        StateVector wf = left_inverse(g, lam, f);
        StateVector lhs = apply_walk(g, wf) - wf * lam;
        StateVector rhs = f - StateVector::delta(0, fourier_direct(g, f, lam));
        double sc = 1.0;
        for (const auto& [x, v] : wf.entries()) { (void)x; sc = std::max(sc, std::abs(lam) * v.norm()); }
        for (const auto& [x, v] : rhs.entries()) { (void)x; sc = std::max(sc, v.norm()); }
        defect = std::max(defect, max_entry(lhs - rhs) / sc);
    }
    r.checks.push_back({"(U-lambda)Psi = f, Psi(0) = w", inh, 1e-11});
    r.checks.push_back({"(U*-conj lambda)Phi = f, Phi(0) = w", conj, 1e-11});
    r.checks.push_back({"W(U-lambda)f = f (relative to kernel-term magnitude)", left, 1e-11});
    // unscaled error is informative only: it grows with the cocycle on ill-conditioned fields
    r.checks.push_back({"W(U-lambda)f = f (relative to |f|, informational)", left_raw, 1e-6});
    r.checks.push_back({"(U-lambda)Wf = f - delta_0 (x) f^(lambda)", defect, 1e-11});
}

void shift_criterion(Rng& rng, CriterionResult& r) {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        CoinField g = rng.field();
        StateVector f = rng.state(rng.integer(1, 6));
        LaurentTransform ft = qw_fourier(g, f), fu = qw_fourier(g, apply_walk(g, f));
        for (int t = 0; t < 16; ++t) {
            cd lam = rng.lambda(0.5, 2.0);
            Vec2 b = lam * ft(lam);
            worst = std::max(worst, (fu(lam) - b).norm() / std::max(1.0, b.norm()));
        }
    }
    r.checks.push_back({"F[Uf](lambda) - lambda F[f](lambda), 20 cases x 16 lambda", worst, 1e-12});
}

void x0_oracle_criterion(Rng& rng, CriterionResult& r) {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        CoinField f = rng.field();
        cd lam = rng.lambda_two_bands(0.2, 0.8, 1.25, 5.0);
        Mat2 a = x0_via_directions(f, lam).x0, b = neumann_x0(f, lam, 1e-12);
        worst = std::max(worst, maxabs(Mat2(a - b)));
    }
    r.checks.push_back({"directions vs Neumann series (50 cases)", worst, 1e-9});

    CoinField id = CoinField::homogeneous(UnitaryCoin());
    double inside = 0.0;
    for (cd lam : {cd(0.5), cd(0.2, 0.3), cd(-0.7, 0.1)}) inside = std::max(inside, maxabs(x0_via_directions(id, lam).x0));
    r.checks.push_back({"identity field: x0 = 0 inside the disc", inside, 1e-12});
    double outside = maxabs(Mat2(x0_via_directions(id, 2.0).x0 + 0.5 * Mat2::Identity()));
    r.checks.push_back({"identity field: x0(2) = -I/2", outside, 1e-12});
}

void homogeneous_x0_criterion(Rng&, CriterionResult& r) {
    Mat2 closed = homogeneous_x0(hadamard(), 0.5);
    CoinField h = hadamard_field();
    r.checks.push_back({"closed form vs directions at lambda = 1/2", maxabs(Mat2(closed - x0_via_directions(h, 0.5).x0)), 1e-10});
    r.checks.push_back({"closed form vs Neumann at lambda = 1/2", maxabs(Mat2(closed - neumann_x0(h, 0.5))), 1e-10});
    // the quoted 7-digit spot value −0.2723928 is itself off by 3e-7
    r.checks.push_back({"spot value (1,1) vs -0.2723928", std::abs(closed(0, 0) - cd(-0.2723928)), 1e-6});
    TranslationResiduals t = translation_identity_residuals(hadamard(), 0.5);
    r.checks.push_back({"translation identity (lambda^-1 convention)", t.with_inverse_lambda, 1e-10});
    r.checks.push_back({"translation identity without lambda^-1 fails", t.literal, 1e-3, true});
}

void constant_coin_criterion(const AcceptanceOptions& opt, Rng&, CriterionResult& r) {
    const UnitaryCoin h = hadamard();
    CoinField f = hadamard_field();
    SpectralMeasure m = homogeneous_measure(h, opt.nodes_per_arc);
    r.checks.push_back({"total mass - I", maxabs(Mat2(m.total_mass() - Mat2::Identity())), 1e-6});

    double radial = 0.0;
    for (const RadialSample& s : ac_density(f, opt.radial_grid)) {
        double edge = 1e9;
        for (double e : {kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4}) edge = std::min(edge, angle_gap(s.theta, e));
        if (edge <= 0.05) continue;
        radial = std::max(radial, maxabs(Mat2(s.density - homogeneous_density(h, s.theta))));
    }
    r.checks.push_back({"radial limit vs closed density (sup, > 0.05 from edges)", radial, 1e-3});

    MomentSequence mom = moments(m, 20);
    double worst = 0.0;
    for (int n = -20; n <= 20; ++n) worst = std::max(worst, maxabs(Mat2(mom[n] - exact_moment_oracle(f, n))));
    r.checks.push_back({"moments |n| <= 20 vs exact evolution", worst, 1e-6});
    r.checks.push_back({"min eigenvalue of density samples", m.min_eigenvalue(), -1e-9, true});
}

void two_phase_criterion(const AcceptanceOptions& opt, Rng&, CriterionResult& r) {
    CoinField f = two_phase_example();
    TwoPhaseModel tp = TwoPhaseModel::from_field(f);
    auto closed = tp.masses();

    std::vector<double> cand = eigenvalue_candidates(f, 4096);
    std::vector<PointMass> est = point_masses(f, cand);
    r.checks.push_back({"detected point masses (expect 4)", std::abs(double(est.size()) - 4.0), 0.5});

    double xs_err = 0.0, ang = 0.0, mass_err = 0.0, feval = 0.0, est_psd = 0.0;
    for (const auto& pm : closed) {
        double best = 1e9;
        const PointMass* hit = nullptr;
        for (const auto& e : est)
            if (angle_gap(e.theta, pm.theta) < best) best = angle_gap(e.theta, pm.theta), hit = &e;
        ang = std::max(ang, best);
        if (!hit) { mass_err = 1e9; continue; }
        xs_err = std::max(xs_err, std::abs(std::abs(std::cos(hit->theta)) - tp.x_star()));
        mass_err = std::max(mass_err, maxabs(Mat2(hit->mass - pm.mass)));
        feval = std::max(feval, std::abs(tp.eigen_function(hit->zeta())));
        est_psd = std::min(est_psd, min_eigenvalue(hit->mass));
    }
    r.checks.push_back({"|x_* formula - 0.8164966|", std::abs(tp.x_star() - 0.8164966), 1e-7});
    r.checks.push_back({"detected |Re zeta| vs x_*", xs_err, 1e-9});
    r.checks.push_back({"detected angles vs closed form", ang, 1e-9});
    r.checks.push_back({"f(zeta) = 1-s-J Z_- at detected eigenvalues", feval, 1e-8});

    double psd = 0.0, rank = 0.0;
    for (const auto& pm : closed) {
        psd = std::min(psd, min_eigenvalue(pm.mass));
        rank = std::max(rank, rank_one_defect(pm.mass));
    }
    r.checks.push_back({"closed-form masses: min eigenvalue", psd, -1e-8, true});
    r.checks.push_back({"closed-form masses: rank-one defect", rank, 1e-8});
    r.checks.push_back({"estimator vs closed-form masses", mass_err, 1e-5});
    r.checks.push_back({"estimator masses: min eigenvalue", est_psd, -1e-8, true});
    double res = std::max(maxabs(Mat2(tp.residue_mass(closed[0].zeta()) - closed[0].mass)),
                          maxabs(Mat2(tp.residue_mass(closed[3].zeta()) - closed[3].mass)));
    r.checks.push_back({"residue form at zeta_*, conj zeta_*", res, 1e-10});

    SpectralMeasure m = tp.measure(opt.nodes_per_arc);
    r.checks.push_back({"total mass - I", maxabs(Mat2(m.total_mass() - Mat2::Identity())), 1e-6});
    MomentSequence mom = moments(m, 20);
    double worst = 0.0;
    for (int n = -20; n <= 20; ++n) worst = std::max(worst, maxabs(Mat2(mom[n] - exact_moment_oracle(f, n))));
    r.checks.push_back({"moments |n| <= 20 vs exact evolution", worst, 1e-5});
}

void expansion_criterion(const AcceptanceOptions& opt, Rng& rng, CriterionResult& r) {
    struct Case {
        CoinField field;
        SpectralMeasure measure;
        double tol;
        const char* name;
    };
    std::vector<Case> cases;
    cases.push_back({hadamard_field(), homogeneous_measure(hadamard(), opt.nodes_per_arc), 1e-6, "homogeneous"});
    cases.push_back({two_phase_example(), TwoPhaseModel::from_field(two_phase_example()).measure(opt.nodes_per_arc),
                     1e-5, "two-phase"});
    for (const Case& c : cases) {
        double pars = 0.0, inv = 0.0, res = 0.0;
        for (int k = 0; k < 20; ++k) {
            StateVector f = sparse_state(rng, 4), g = sparse_state(rng, 4);
            pars = std::max(pars, parseval_check(c.field, c.measure, f, g));
            for (Site x = -6; x <= 6; ++x) inv = std::max(inv, inversion_check(c.field, c.measure, f, x));
        }
        for (int k = 0; k < 10; ++k) {
            StateVector f = sparse_state(rng, 4), g = sparse_state(rng, 4);
            cd lam = rng.lambda_two_bands(0.2, 0.7, 1.4, 5.0);
            res = std::max(res, resolvent_representation_check(c.field, c.measure, f, g, lam));
        }
        r.checks.push_back({std::string("Parseval, ") + c.name + " (20 pairs)", pars, c.tol});
        r.checks.push_back({std::string("inversion, ") + c.name + " (20 f, x in [-6,6])", inv, c.tol});
        r.checks.push_back({std::string("resolvent representation, ") + c.name + " (10 lambda)", res, 1e-5});
    }
}

void structure_criterion(Rng& rng, CriterionResult& r) {
    double rank = 0.0, pd = 1e9, conj = 0.0;
    for (int k = 0; k < 50; ++k) {
        CoinField f = rng.field();
        cd lam = rng.lambda_two_bands(0.2, 0.9, 1.1, 5.0);
        RankOneCertificate c = rank_one_certificates(f, x0_via_directions(f, lam));
        rank = std::max({rank, c.left, c.right});
        conj = std::max(conj, conjugation_check(f, rng.lambda_two_bands(0.2, 0.9, 1.1, 5.0)));
    }
    for (int k = 0; k < 100; ++k) {
        CoinField f = rng.field();
        cd lam = std::polar(rng.uniform(1e-3, 0.95), rng.uniform(0, 2 * kPi));
        pd = std::min(pd, min_eigenvalue(caratheodory(f, lam).re_part));
    }
    r.checks.push_back({"rank-one certificates (50 cases)", rank, 1e-10});
    r.checks.push_back({"min eigenvalue of Re x(lambda), |lambda| < 0.95 (100 cases)", pd, 0.0, true});
    r.checks.push_back({"conjugation identity (50 cases)", conj, 1e-10});

    double smallest_final = 1e300;
    bool monotone = true;
    for (int k = 0; k < 10; ++k) {
        CoinField f = rng.field();
        cd lam = rng.lambda_two_bands(0.3, 0.9, 1.1, 3.0);
        std::vector<double> s = hs_partial_sums(f, lam, 1e6, 100000);
        if (s.empty()) { smallest_final = 0.0; continue; }
        smallest_final = std::min(smallest_final, s.back());
        for (std::size_t i = 1; i < s.size(); ++i) monotone = monotone && s[i] > s[i - 1];
    }
    r.checks.push_back({"Hilbert-Schmidt partial sums: smallest final value", smallest_final, 1e6, true});
    r.checks.push_back({"Hilbert-Schmidt partial sums strictly increasing", monotone ? 1.0 : 0.0, 0.5, true});
}

void eigenvalue_criterion(Rng& rng, CriterionResult& r) {
    CoinField f = two_phase_example();
    TwoPhaseModel tp = TwoPhaseModel::from_field(f);
    double align = 0.0, ratio = 0.0, mono = 1.0;
    for (const auto& pm : tp.masses()) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(pm.mass);
        EigenfunctionDecay d = eigenfunction_decay(f, pm.theta, es.eigenvectors().col(1), 30);
        align = std::max(align, d.alignment);
        ratio = std::max({ratio, d.ratio_plus, d.ratio_minus});
        if (!d.monotone_plus || !d.monotone_minus) mono = 0.0;
    }
    r.checks.push_back({"range vector vs decaying directions", align, 1e-8});
    r.checks.push_back({"tail decay |Phi(+-30)|/|Phi(+-1)|", ratio, 1e-3});
    r.checks.push_back({"tails strictly decreasing over 30 sites", mono, 0.5, true});

    double largest = 0.0;
    std::vector<CoinField> fields{hadamard_field()};
    for (int k = 0; k < 5; ++k) fields.push_back(CoinField::homogeneous(rng.coin()));
    for (const CoinField& h : fields) {
        for (const auto& pm : point_masses(h, eigenvalue_candidates(h, 2048)))
            largest = std::max(largest, max_eigenvalue(pm.mass));
        for (int j = 0; j < 8; ++j) {
            double t = rng.uniform(0, 2 * kPi);
            if (in_spectral_gap(h, t)) largest = std::max(largest, max_eigenvalue(point_mass_estimate(h, t)));
        }
    }
    r.checks.push_back({"homogeneous fields: largest point mass", largest, 1e-10});
}

struct Spec {
    int id;
    const char* name;
    double limit;
    std::function<void(Rng&, CriterionResult&)> run;
};

} // namespace

bool CriterionResult::pass() const {
    if (!error.empty() || checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.ok()) return false;
    return time_limit <= 0.0 || seconds < time_limit;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, const std::vector<int>& only,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    const std::vector<Spec> specs = {
        {1, "identity suite", 10, identity_suite_criterion},
        {2, "solver contracts", 10, solver_criterion},
        {3, "shift property of the QW-Fourier transform", 0, shift_criterion},
        {4, "x0 oracle equivalence", 0, x0_oracle_criterion},
        {5, "homogeneous x0 closed form", 0, homogeneous_x0_criterion},
        {6, "constant-coin measure", 60, [&](Rng& g, CriterionResult& r) { constant_coin_criterion(opt, g, r); }},
        {7, "two-phase measure", 120, [&](Rng& g, CriterionResult& r) { two_phase_criterion(opt, g, r); }},
        {8, "expansion theorem", 0, [&](Rng& g, CriterionResult& r) { expansion_criterion(opt, g, r); }},
        {9, "structure theorems", 0, structure_criterion},
        {10, "eigenvalue semantics", 0, eigenvalue_criterion},
    };
    std::vector<CriterionResult> out;
    for (const Spec& s : specs) {
        if (!only.empty() && std::find(only.begin(), only.end(), s.id) == only.end()) continue;
        CriterionResult r;
        r.id = s.id;
        r.name = s.name;
        r.time_limit = s.limit;
        Rng rng(opt.seed + static_cast<std::uint64_t>(s.id));
        auto t0 = std::chrono::steady_clock::now();
        try {
            s.run(rng, r);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result_line(const CriterionResult& r) {
    char head[160];
    std::snprintf(head, sizeof head, "%s  %2d  %-44s %7.2f s", r.pass() ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds);
    std::string line = head;
    if (r.time_limit > 0) line += " (limit " + io::format_double(r.time_limit) + " s)";
    if (!r.error.empty()) return line + "  error: " + r.error;
    std::string worst;
    for (const auto& c : r.checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s%s %.3g %s %.3g", worst.empty() ? "" : "; ", c.name.c_str(), c.value,
                      c.at_least ? ">" : "<", c.bound);
        if (!c.ok()) worst += std::string(buf) + " [FAILED]";
        else worst += buf;
    }
    return line + "  | " + worst;
}

io::json acceptance_json(const std::vector<CriterionResult>& results, const AcceptanceOptions& opt) {
    io::json arr = io::json::array();
    bool all = true;
    for (const auto& r : results) {
        io::json checks = io::json::array();
        for (const auto& c : r.checks)
            checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound},
                              {"comparison", c.at_least ? ">" : "<"}, {"ok", c.ok()}});
        io::json e = {{"id", r.id}, {"name", r.name}, {"pass", r.pass()}, {"seconds", r.seconds}, {"checks", checks}};
        if (r.time_limit > 0) e["time_limit"] = r.time_limit;
        if (!r.error.empty()) e["error"] = r.error;
        arr.push_back(e);
        all = all && r.pass();
    }
    return {{"seed", opt.seed}, {"nodes_per_arc", opt.nodes_per_arc}, {"radial_grid", opt.radial_grid},
            {"all_pass", all}, {"criteria", arr}};
}

} // namespace qwspec
