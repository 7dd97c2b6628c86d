#include "qwspec/transfer.hpp"

namespace qwspec {

namespace {

// beyond the override window by this many sites the tail is diagonalised
constexpr Site kFastPathOffset = 64;

} // namespace

Mat2 transfer_matrix(const UnitaryCoin& cx, const UnitaryCoin& cx1, cd lambda) {
    require_nonzero(lambda);
    const cd li = 1.0 / lambda;
    Mat2 t;
    t << (lambda - li * cx.c() * cx1.b()) / cx1.a(), -li * cx1.b() * cx.d() / cx1.a(),
         li * cx.c(), li * cx.d();
    return t;
}

Mat2 transfer_inverse(const UnitaryCoin& cx, const UnitaryCoin& cx1, cd lambda) {
    require_nonzero(lambda);
    const cd li = 1.0 / lambda;
    Mat2 t;
    t << li * cx1.a(), li * cx1.b(),
         -li * cx.c() * cx1.a() / cx.d(), (lambda - li * cx1.b() * cx.c()) / cx.d();
    return t;
}

Mat2 transfer_matrix(const CoinField& field, Site x, cd lambda) {
    return transfer_matrix(field.coin_at(x), field.coin_at(x + 1), lambda);
}

Mat2 transfer_inverse(const CoinField& field, Site x, cd lambda) {
    return transfer_inverse(field.coin_at(x), field.coin_at(x + 1), lambda);
}

Mat2 alt_transfer(const CoinField& field, Site x, cd lambda) {
    require_nonzero(lambda);
    const UnitaryCoin& c = field.coin_at(x);
    Mat2 s;
    s << lambda, -c.b(), c.c(), c.delta() / lambda;
    return s / c.a();
}

PropagatorCocycle::PropagatorCocycle(const CoinField& field, cd lambda, bool fast_path)
    : field_(&field), lambda_(lambda), fast_(fast_path) {
    require_nonzero(lambda);
    pos_.push_back(Mat2::Identity());
    neg_.push_back(Mat2::Identity());
}

Mat2 PropagatorCocycle::tail_power(const UnitaryCoin& tail, Site steps, const Mat2& start) const {
    Mat2 t = transfer_matrix(tail, tail, lambda_);
    if (steps < 0) {
        t = transfer_inverse(tail, tail, lambda_);
        steps = -steps;
    }
    auto [z1, z2] = eigenvalues2(t);
    // near a double eigenvalue the diagonalisation is singular: multiply instead
    if (std::abs(z1 - z2) > 1e-6 * std::max(1.0, std::abs(z2))) {
        Mat2 p;
        p.col(0) = eigenvector2(t, z1);
        p.col(1) = eigenvector2(t, z2);
        Eigen::Vector2cd pw(std::pow(z1, static_cast<double>(steps)), std::pow(z2, static_cast<double>(steps)));
        return p * pw.asDiagonal() * p.inverse() * start;
    }
    Mat2 f = start;
    for (Site k = 0; k < steps; ++k) f = t * f;
    return f;
}

Mat2 PropagatorCocycle::operator()(Site x) {
    if (x >= 0) {
        const Site lim = field_->n_plus() + kFastPathOffset;
        if (fast_ && x > lim) return tail_power(field_->right_tail(), x - lim, (*this)(lim));
        while (static_cast<Site>(pos_.size()) <= x) {
            Site k = static_cast<Site>(pos_.size()) - 1;
            pos_.push_back(transfer_matrix(*field_, k, lambda_) * pos_.back());
        }
        return pos_[static_cast<std::size_t>(x)];
    }
    const Site lim = field_->n_minus() + 1 + kFastPathOffset;
    if (fast_ && -x > lim) return tail_power(field_->left_tail(), x + lim, (*this)(-lim));
    while (static_cast<Site>(neg_.size()) <= -x) {
        Site k = -static_cast<Site>(neg_.size());  // next site to fill
        neg_.push_back(transfer_inverse(*field_, k, lambda_) * neg_.back());
    }
    return neg_[static_cast<std::size_t>(-x)];
}

Mat2 PropagatorCocycle::between(Site x, Site y) const {
    Mat2 m = Mat2::Identity();
    if (x >= y) {
        for (Site k = y; k < x; ++k) m = transfer_matrix(*field_, k, lambda_) * m;
    } else {
        for (Site k = y - 1; k >= x; --k) m = transfer_inverse(*field_, k, lambda_) * m;
    }
    return m;
}

Mat2 PropagatorCocycle::inverse(Site x) const { return between(0, x); }

Mat2 propagator(const CoinField& field, Site x, cd lambda) {
    PropagatorCocycle f(field, lambda);
    return f(x);
}

double IdentityResiduals::max() const {
    double m = std::max(std::abs(det_T), std::abs(det_S));
    for (double v : r) m = std::max(m, v);
    return m;
}

const std::array<const char*, 10>& IdentityResiduals::names() {
    static const std::array<const char*, 10> n = {
        "cocycle step", "left intertwining", "right intertwining", "z_L forms", "z_R forms",
        "projector complement", "coin decomposition", "one-step sandwich", "cocycle sandwich",
        "coin-cocycle relation"};
    return n;
}

IdentityResiduals identity_suite(const CoinField& field, Site x, cd lambda) {
    require_nonzero(lambda);
    const cd ls = reflect(lambda);
    const Mat2 I = Mat2::Identity();
    const UnitaryCoin& c = field.coin_at(x);
    const UnitaryCoin& cp = field.coin_at(x + 1);
    const UnitaryCoin& cm = field.coin_at(x - 1);
    const Mat2 C = c.matrix();
    const Mat2 PL = pi_L(), PR = pi_R();
    const SiteProjectors z = site_projectors(c), z1 = site_projectors(cp), z0 = site_projectors(field.coin_at(0));

    const Mat2 T = transfer_matrix(c, cp, lambda);
    const Mat2 Tm = transfer_matrix(cm, c, lambda);
    const Mat2 Ti = transfer_inverse(c, cp, lambda);
    const Mat2 Ts = transfer_matrix(c, cp, ls);

    PropagatorCocycle F(field, lambda, false), Fs(field, ls, false);
    const Mat2 Fx = F(x), Fx1 = F(x + 1), Fxm = F(x - 1);
    const Mat2 Fsx = Fs(x);

    IdentityResiduals out;
    auto& r = out.r;
    const double nT = maxabs(T), nTm = maxabs(Tm), nTi = maxabs(Ti), nTs = maxabs(Ts);
    const double nF = maxabs(Fx), nFs = maxabs(Fsx);

    r[0] = relative(maxabs(Mat2(Fx1 - T * Fx)), nT * nF);
    r[1] = relative(maxabs(Mat2(PL * C * Tm - lambda * PL)), nTm);
    r[2] = relative(maxabs(Mat2(PR * C * Ti - lambda * PR)), nTi);
    {
        Mat2 f1 = (lambda / cp.a()) * Ti * PL;
        Mat2 f2 = (c.delta() / c.d()) * C.adjoint() * PL;
        r[3] = relative(std::max(maxabs(Mat2(z.zL - f1)), maxabs(Mat2(z.zL - f2))), std::abs(lambda) * nTi);
    }
    {
        Mat2 f1 = (lambda / cm.d()) * Tm * PR;
        Mat2 f2 = (c.delta() / c.a()) * C.adjoint() * PR;
        r[4] = relative(std::max(maxabs(Mat2(z.zR - f1)), maxabs(Mat2(z.zR - f2))), std::abs(lambda) * nTm);
    }
    r[5] = std::max(maxabs(Mat2(z.zL.adjoint() + z.zR - I)), maxabs(Mat2(z.zL + z.zR.adjoint() - I)));
    {
        Mat2 f1 = c.a() * z.zL.adjoint() + c.d() * z.zR.adjoint();
        Mat2 f2 = PL * C * z.zL.adjoint() + PR * C * z.zR.adjoint();
        r[6] = relative(std::max(maxabs(Mat2(f1 - C)), maxabs(Mat2(f2 - C))), maxabs(z.zL) + maxabs(z.zR));
    }
    {
        Mat2 lhs = T * (z.zL - z.zR) * Ts.adjoint();
        r[7] = relative(maxabs(Mat2(lhs - (z1.zL - z1.zR))), nT * nTs * maxabs(Mat2(z.zL - z.zR)));
    }
    {
        Mat2 lhs = Fx * (z0.zL - z0.zR) * Fsx.adjoint();
        r[8] = relative(maxabs(Mat2(lhs - (z.zL - z.zR))), nF * nFs * maxabs(Mat2(z0.zL - z0.zR)));
    }
    {
        Mat2 rhs = lambda * PL * Fxm + lambda * PR * Fx1;
        r[9] = relative(maxabs(Mat2(C * Fx - rhs)), std::max({nF, std::abs(lambda) * maxabs(Fxm), std::abs(lambda) * maxabs(Fx1)}));
    }
    out.det_T = std::abs(T.determinant() * cp.a() / c.d() - 1.0);
    out.det_S = std::abs(alt_transfer(field, x, lambda).determinant() * c.a() / c.d() - 1.0);
    return out;
}

std::vector<double> wronskian(const CoinField& field, cd lambda, const Vec2& u, const Vec2& v, Site lo, Site hi) {
    PropagatorCocycle F(field, lambda);
    std::vector<double> w;
    for (Site x = lo; x <= hi; ++x) {
        Vec2 fm = F(x - 1) * u, f0 = F(x) * u;
        Vec2 gm = F(x - 1) * v, g0 = F(x) * v;
        w.push_back(std::abs(fm(0) * g0(1) - f0(1) * gm(0)));
    }
    return w;
}

std::vector<double> hs_partial_sums(const CoinField& field, cd lambda, double target, Site max_sites) {
    PropagatorCocycle F(field, lambda);
    std::vector<double> sums;
    double s = 0.0;
    for (Site x = 1; x <= max_sites; ++x) {
        s += F(x).squaredNorm();
        sums.push_back(s);
        if (s > target) break;
    }
    return sums;
}

} // namespace qwspec
