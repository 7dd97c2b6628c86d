#include "qwspec/resolvent.hpp"

namespace qwspec {

namespace {

void require_off_circle(cd lambda) {
    require_nonzero(lambda);
    if (std::abs(std::abs(lambda) - 1.0) < 1e-15) throw UnitModulusLambda();
}

UnitaryCoin require_su2(const UnitaryCoin& coin, const char* who) {
    if (!coin.is_su2(1e-12)) throw InvalidCoin(std::string(who) + ": coin is not in SU(2)");
    return coin;
}

} // namespace

cd branch_alpha_z_plus(cd mu, double abs_alpha) {
    const cd J = 0.5 * (mu + 1.0 / mu);
    const double a2 = abs_alpha * abs_alpha;
    if (mu.real() > 0.0) return J - std::sqrt(J * J - a2);
    if (mu.real() < 0.0) return J + std::sqrt(J * J - a2);
    // imaginary axis
    const bool inside = std::abs(mu) < 1.0;
    const bool upper = mu.imag() > 0.0;
    if (inside == upper) return J + I_unit * std::sqrt(a2 - J * J);
    return J - I_unit * std::sqrt(a2 - J * J);
}

TailSplit tail_eigensplit(const UnitaryCoin& tail, cd lambda) {
    require_off_circle(lambda);
    // C = e^{iφ}C', C' ∈ SU(2), and T_λ(C) = T_{λe^{−iφ}}(C')
    const cd phase = std::sqrt(tail.delta());
    TailSplit s;
    s.alpha = tail.a() / phase;
    s.mu = lambda / phase;
    const double aa = std::abs(s.alpha);
    const cd J = 0.5 * (s.mu + 1.0 / s.mu);
    cd az_plus = branch_alpha_z_plus(s.mu, aa);
    cd az_minus = aa * aa / az_plus;
    if (std::abs(az_plus - az_minus) < 1e-7 * std::max(1.0, std::abs(J)))
        throw DegenerateSpectralParameter("tail transfer matrix has a double eigenvalue");
    if (std::abs(az_plus) > std::abs(az_minus)) std::swap(az_plus, az_minus);  // labels by modulus
    s.z_plus = az_plus / s.alpha;
    s.z_minus = az_minus / s.alpha;
    const Mat2 T = transfer_matrix(tail, tail, lambda);
    s.w_plus = eigenvector2(T, s.z_plus, &s.z_minus);
    s.w_minus = eigenvector2(T, s.z_minus, &s.z_plus);
    return s;
}

DecayingDirections decaying_directions(const CoinField& field, cd lambda, bool check_independent) {
    require_off_circle(lambda);
    DecayingDirections d;
    d.lambda = lambda;
    d.right = tail_eigensplit(field.right_tail(), lambda);
    d.left = tail_eigensplit(field.left_tail(), lambda);
    PropagatorCocycle F(field, lambda);
    d.v_plus = (F.between(0, field.n_plus()) * d.right.w_plus).normalized();
    d.v_minus = (F.between(0, -field.n_minus()) * d.left.w_minus).normalized();
    if (check_independent && std::abs(d.det()) < 1e-10)
        throw DependentDirections("decaying directions are linearly dependent");
    return d;
}

DecayCertificate decay_certificate(const CoinField& field, const DecayingDirections& d, int sites) {
    // F(x)v₊ = T_R^{x−N₊} F(N₊)v₊ and F(N₊)v₊ ∥ w₊ (F(N₊)F(N₊)⁻¹ = I); propagating the tail
    // eigenvector avoids re-multiplying through the window. Roundoff along the growing mode
    // still grows by |z₋/z₊| per site, so only sites where that stays below 1e12 are sampled.
    auto usable = [sites](const TailSplit& t) {
        double g = std::log(std::abs(t.z_minus / t.z_plus));
        int k = g > 0.0 ? static_cast<int>(std::floor(std::log(1e12) / g)) : sites;
        return std::clamp(k, 3, sites);
    };
    auto alignment = [](const Vec2& a, const Vec2& w) { return std::abs(det2(a.normalized(), w)); };
    PropagatorCocycle F(field, d.lambda, false);
    DecayCertificate c;
    c.sites_plus = usable(d.right);
    c.sites_minus = usable(d.left);
    c.alignment_plus = alignment(F(field.n_plus()) * d.v_plus, d.right.w_plus);
    c.alignment_minus = alignment(F(-field.n_minus()) * d.v_minus, d.left.w_minus);

    const Mat2 TR = transfer_matrix(field.right_tail(), field.right_tail(), d.lambda);
    const Mat2 TLi = transfer_inverse(field.left_tail(), field.left_tail(), d.lambda);
    Vec2 v = d.right.w_plus;
    for (int k = 0; k < c.sites_plus; ++k) {
        Vec2 nv = TR * v;
        c.max_ratio_plus = std::max(c.max_ratio_plus, nv.norm() / v.norm());
        v = nv;
    }
    v = d.left.w_minus;
    for (int k = 0; k < c.sites_minus; ++k) {
        Vec2 nv = TLi * v;
        c.max_ratio_minus = std::max(c.max_ratio_minus, nv.norm() / v.norm());
        v = nv;
    }
    return c;
}

ResolventData x0_via_directions(const CoinField& field, cd lambda) {
    DecayingDirections d = decaying_directions(field, lambda);
    const SiteProjectors z0 = site_projectors(field.coin_at(0));
    const cd li = 1.0 / lambda;
    const Vec2 pp = perp(d.v_plus), pm = perp(d.v_minus);
    ResolventData r;
    r.lambda = lambda;
    r.v_plus = d.v_plus;
    r.v_minus = d.v_minus;
    r.x0.col(0) = -li * inner(z0.zL * e_L(), pp) / inner(d.v_minus, pp) * d.v_minus;
    r.x0.col(1) = -li * inner(z0.zR * e_R(), pm) / inner(d.v_plus, pm) * d.v_plus;
    r.x_carath = Mat2::Identity() + 2.0 * lambda * r.x0;
    return r;
}

Mat2 x0_via_coefficients(const CoinField& field, const DecayingDirections& d) {
    // λ⁻¹z_L(0)e_L = a_L v₊ − b_L v₋,  −λ⁻¹z_R(0)e_R = a_R v₊ − b_R v₋
    const SiteProjectors z0 = site_projectors(field.coin_at(0));
    const cd li = 1.0 / d.lambda;
    const cd m = inner(d.v_plus, d.v_minus);
    Mat2 M;
    M << 1.0, -std::conj(m), m, -1.0;
    const Mat2 Mi = M.inverse();
    const Vec2 uL = li * z0.zL * e_L(), uR = -li * z0.zR * e_R();
    Vec2 ab_L = Mi * Vec2(inner(uL, d.v_plus), inner(uL, d.v_minus));
    Vec2 ab_R = Mi * Vec2(inner(uR, d.v_plus), inner(uR, d.v_minus));
    Mat2 x0;
    x0.col(0) = ab_L(1) * d.v_minus;  // x₀e_L = b_L v₋
    x0.col(1) = ab_R(0) * d.v_plus;   // x₀e_R = a_R v₊
    return x0;
}

Mat2 neumann_green(const CoinField& field, cd lambda, Site x, Site y, double tol, int cap) {
    require_off_circle(lambda);
    const double q = std::min(std::abs(lambda), 1.0 / std::abs(lambda));
    // smallest N with q^N/(1−q) < tol
    const double nreq = std::ceil(std::log(tol * (1.0 - q)) / std::log(q));
    if (!(nreq <= cap)) throw SlowConvergence("Neumann series needs more than the configured number of terms");
    const int N = std::max(1, static_cast<int>(nreq));
    const bool inside = std::abs(lambda) < 1.0;

    // dense state on [y−N−2, y+N+2]
    const Site lo = y - N - 2, len = 2 * N + 5;
    std::vector<Mat2> coins(len), coins_adj(len);
    for (Site k = 0; k < len; ++k) {
        coins[k] = field.coin_at(lo + k).matrix();
        coins_adj[k] = coins[k].adjoint();
    }
    Mat2 out = Mat2::Zero();
    if (x < lo + 1 || x > lo + len - 2) return out;  // out of reach within N steps
    for (int c = 0; c < 2; ++c) {
        std::vector<Vec2> psi(len, Vec2::Zero()), nxt(len, Vec2::Zero());
        psi[y - lo](c) = 1.0;
        Vec2 acc = Vec2::Zero();
        cd coef = inside ? cd(1.0) : -1.0 / lambda;
        const cd step = inside ? lambda : 1.0 / lambda;
        for (int n = 0; n < N; ++n) {
            if (inside || n > 0) {
                for (Site k = 1; k < len - 1; ++k) {
                    if (inside)
                        nxt[k] = coins_adj[k] * Vec2(psi[k - 1](0), 0) + coins_adj[k] * Vec2(0, psi[k + 1](1));
                    else
                        nxt[k] = pi_L() * coins[k + 1] * psi[k + 1] + pi_R() * coins[k - 1] * psi[k - 1];
                }
                std::swap(psi, nxt);
            }
            acc += coef * psi[x - lo];
            coef *= step;
        }
        out.col(c) = acc;
    }
    return out;
}

// ----------------------------------------------------------------------------- Green kernel

GreenFunction::GreenFunction(const CoinField& field, cd lambda)
    : GreenFunction(field, x0_via_directions(field, lambda)) {}

GreenFunction::GreenFunction(const CoinField& field, ResolventData data)
    : field_(&field), data_(std::move(data)), F_(field, data_.lambda), Fs_(field, reflect(data_.lambda)) {
    const SiteProjectors z0 = site_projectors(field.coin_at(0));
    const cd li = 1.0 / data_.lambda;
    AL_ = data_.x0 + li * z0.zL;
    AR_ = data_.x0 + li * z0.zR;
}

GreenKernelEntry GreenFunction::entry(Site x, Site y) {
    GreenKernelEntry e;
    e.x = x;
    e.y = y;
    const Mat2 Fx = F_(x), Fy = Fs_(y).adjoint();
    if (y < x) {
        e.matrix = Fx * AL_ * Fy;
        e.rank_defect = std::abs(e.matrix.determinant()) / std::pow(maxabs(Fx) * maxabs(AL_) * maxabs(Fy), 2);
    } else if (y > x) {
        e.matrix = Fx * AR_ * Fy;
        e.rank_defect = std::abs(e.matrix.determinant()) / std::pow(maxabs(Fx) * maxabs(AR_) * maxabs(Fy), 2);
    } else {
        const SiteProjectors z = site_projectors(field_->coin_at(x));
        const cd li = 1.0 / data_.lambda;
        Mat2 m1 = Fx * AL_ * Fy - li * z.zL;
        Mat2 m2 = Fx * AR_ * Fy - li * z.zR;
        e.matrix = m1;
        e.diagonal_mismatch = relative(maxabs(Mat2(m1 - m2)), maxabs(Fx) * maxabs(Fy) * maxabs(AL_));
    }
    return e;
}

SampledFunction GreenFunction::apply(const StateVector& f, Window w) {
    SampledFunction g{w.lo, {}};
    for (Site x = w.lo; x <= w.hi; ++x) {
        Vec2 v = Vec2::Zero();
        for (const auto& [y, fy] : f.entries()) v += entry(x, y).matrix * fy;
        g.values.push_back(v);
    }
    return g;
}

cd GreenFunction::inner(const StateVector& f, const StateVector& g) {
    cd s = 0.0;
    for (const auto& [x, gx] : g.entries()) {
        Vec2 v = Vec2::Zero();
        for (const auto& [y, fy] : f.entries()) v += entry(x, y).matrix * fy;
        s += gx.dot(v);
    }
    return s;
}

GreenKernelEntry green_kernel(const CoinField& field, cd lambda, Site x, Site y) {
    GreenFunction g(field, lambda);
    return g.entry(x, y);
}

// ----------------------------------------------------------------------------- Carathéodory function

Caratheodory caratheodory(const CoinField& field, cd lambda) {
    ResolventData d = x0_via_directions(field, lambda);
    return {d.x_carath, hermitian_part(d.x_carath)};
}

Mat2 re_part_via_reflection(const CoinField& field, cd lambda) {
    const cd ls = reflect(lambda);
    return lambda * x0_via_directions(field, lambda).x0 - ls * x0_via_directions(field, ls).x0;
}

double conjugation_check(const CoinField& field, cd lambda) {
    const cd ls = reflect(lambda);
    const Mat2 x0 = x0_via_directions(field, lambda).x0;
    const Mat2 x0s = x0_via_directions(field, ls).x0;
    const Mat2 rhs = -ls * (Mat2::Identity() + ls * x0s);
    return relative(maxabs(Mat2(x0.adjoint() - rhs)), maxabs(x0));
}

RankOneCertificate rank_one_certificates(const CoinField& field, const ResolventData& d) {
    const SiteProjectors z0 = site_projectors(field.coin_at(0));
    const cd li = 1.0 / d.lambda;
    return {rank_one_defect(Mat2(d.x0 + li * z0.zL)), rank_one_defect(Mat2(d.x0 + li * z0.zR))};
}

// ----------------------------------------------------------------------------- homogeneous closed forms

Mat2 homogeneous_x0(const UnitaryCoin& coin, cd lambda) {
    require_su2(coin, "homogeneous_x0");
    const TailSplit s = tail_eigensplit(coin, lambda);
    const cd al = coin.a(), be = coin.b();
    const cd az = al * s.z_plus;
    Mat2 m;
    m << lambda - az, be * s.z_plus, -(std::conj(be) / std::conj(al)) * az, lambda - az;
    return m / (lambda * al * (s.z_plus - s.z_minus));
}

Mat2 homogeneous_caratheodory(const UnitaryCoin& coin, cd lambda) {
    require_su2(coin, "homogeneous_caratheodory");
    const TailSplit s = tail_eigensplit(coin, lambda);
    const cd al = coin.a(), be = coin.b();
    const cd K = 0.5 * (lambda - 1.0 / lambda);
    Mat2 m;
    m << K, be * s.z_plus, -(std::conj(be) / std::conj(al)) * al * s.z_plus, K;
    return 2.0 / (al * (s.z_plus - s.z_minus)) * m;
}

TranslationResiduals translation_identity_residuals(const UnitaryCoin& coin, cd lambda) {
    const Mat2 x0 = homogeneous_x0(coin, lambda);
    const Mat2 zL = site_projectors(coin).zL;
    const Mat2 T = transfer_matrix(coin, coin, lambda);
    const Mat2 Ts = transfer_matrix(coin, coin, reflect(lambda)).adjoint();
    const double sc = maxabs(T) * maxabs(Ts);
    TranslationResiduals r;
    Mat2 A = x0 + zL / lambda;
    r.with_inverse_lambda = relative(maxabs(Mat2(T * A * Ts - A)), sc * maxabs(A));
    Mat2 B = x0 + zL;
    r.literal = relative(maxabs(Mat2(T * B * Ts - B)), sc * maxabs(B));
    return r;
}

} // namespace qwspec
