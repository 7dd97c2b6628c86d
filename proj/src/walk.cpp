#include "qwspec/walk.hpp"

namespace qwspec {

namespace {

// Neumaier compensated summation
struct Accumulator {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) comp += (sum - t) + v;
        else comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

constexpr double kPrune = 1e-300;

double site_scale(const SampledFunction& g, Site x, cd lambda) {
    return std::max({g.at(x - 1).norm(), std::abs(lambda) * g.at(x).norm(), g.at(x + 1).norm()});
}

} // namespace

// ----------------------------------------------------------------------------- StateVector

void StateVector::set(Site x, const Vec2& v) {
    if (v.cwiseAbs().maxCoeff() < kPrune) values_.erase(x);
    else values_[x] = v;
}

void StateVector::add(Site x, const Vec2& v) { set(x, at(x) + v); }

Vec2 StateVector::at(Site x) const {
    auto it = values_.find(x);
    return it == values_.end() ? Vec2::Zero() : it->second;
}

Site StateVector::radius() const {
    if (values_.empty()) return 0;
    return std::max(std::abs(min_site()), std::abs(max_site()));
}

double StateVector::norm() const {
    Accumulator acc;
    for (const auto& [x, v] : values_) {
        (void)x;
        for (int i = 0; i < 2; ++i) acc.add(std::norm(v(i)));
    }
    return std::sqrt(acc.value());
}

cd StateVector::inner(const StateVector& g) const {
    Accumulator re, im;
    for (const auto& [x, v] : values_) {
        auto it = g.values_.find(x);
        if (it == g.values_.end()) continue;
        for (int i = 0; i < 2; ++i) {
            cd p = v(i) * std::conj(it->second(i));
            re.add(p.real());
            im.add(p.imag());
        }
    }
    return {re.value(), im.value()};
}

StateVector StateVector::operator+(const StateVector& g) const {
    StateVector s = *this;
    for (const auto& [x, v] : g.values_) s.add(x, v);
    return s;
}

StateVector StateVector::operator-(const StateVector& g) const {
    StateVector s = *this;
    for (const auto& [x, v] : g.values_) s.add(x, -v);
    return s;
}

StateVector StateVector::operator*(cd a) const {
    StateVector s;
    for (const auto& [x, v] : values_) s.set(x, a * v);
    return s;
}

// ----------------------------------------------------------------------------- walk

StateVector apply_walk(const CoinField& field, const StateVector& psi) {
    // (UΨ)(x) = π_L C(x+1)Ψ(x+1) + π_R C(x−1)Ψ(x−1)
    StateVector out;
    const Mat2 PL = pi_L(), PR = pi_R();
    for (const auto& [y, v] : psi.entries()) {
        Vec2 cv = field.coin_at(y).matrix() * v;
        out.add(y - 1, PL * cv);
        out.add(y + 1, PR * cv);
    }
    return out;
}

StateVector apply_adjoint(const CoinField& field, const StateVector& phi) {
    // (U*Φ)(x) = C(x)*π_L Φ(x−1) + C(x)*π_R Φ(x+1)
    StateVector out;
    for (const auto& [y, v] : phi.entries()) {
        out.add(y + 1, field.coin_at(y + 1).matrix().adjoint() * Vec2(v(0), 0));
        out.add(y - 1, field.coin_at(y - 1).matrix().adjoint() * Vec2(0, v(1)));
    }
    return out;
}

Vec2 walk_at(const CoinField& field, const SampledFunction& psi, Site x) {
    return pi_L() * field.coin_at(x + 1).matrix() * psi.at(x + 1) +
           pi_R() * field.coin_at(x - 1).matrix() * psi.at(x - 1);
}

Vec2 adjoint_at(const CoinField& field, const SampledFunction& phi, Site x) {
    Mat2 cs = field.coin_at(x).matrix().adjoint();
    return cs * pi_L() * phi.at(x - 1) + cs * pi_R() * phi.at(x + 1);
}

double eigen_residual(const CoinField& field, cd lambda, const SampledFunction& psi, const StateVector& f) {
    double r = 0.0;
    for (Site x = psi.lo + 1; x < psi.hi(); ++x) {
        Vec2 res = walk_at(field, psi, x) - lambda * psi.at(x) - f.at(x);
        r = std::max(r, relative(res.cwiseAbs().maxCoeff(), std::max(site_scale(psi, x, lambda), f.at(x).norm())));
    }
    return r;
}

double conjugate_residual(const CoinField& field, cd lambda, const SampledFunction& phi, const StateVector& f) {
    double r = 0.0;
    for (Site x = phi.lo + 1; x < phi.hi(); ++x) {
        Vec2 res = adjoint_at(field, phi, x) - std::conj(lambda) * phi.at(x) - f.at(x);
        r = std::max(r, relative(res.cwiseAbs().maxCoeff(), std::max(site_scale(phi, x, lambda), f.at(x).norm())));
    }
    return r;
}

SampledFunction eigenfunction(const CoinField& field, cd lambda, const Vec2& u, Window w) {
    PropagatorCocycle F(field, lambda);
    SampledFunction out{w.lo, {}};
    for (Site x = w.lo; x <= w.hi; ++x) out.values.push_back(F(x) * u);
    return out;
}

// ----------------------------------------------------------------------------- kernels

Mat2 v_kernel(PropagatorCocycle& F, Site x, Site y) {
    const CoinField& fld = F.field();
    const cd li = 1.0 / F.lambda();
    if (y == 0) {
        if (x >= 1) return li * F(x) * site_projectors(fld.coin_at(0)).zL;
        if (x <= -1) return li * F(x) * site_projectors(fld.coin_at(0)).zR;
        return Mat2::Zero();
    }
    if (1 <= y && y <= x - 1) {
        SiteProjectors z = site_projectors(fld.coin_at(y));
        return li * F.between(x, y) * (z.zL - z.zR);
    }
    if (1 <= y && y == x) return -li * site_projectors(fld.coin_at(x)).zR;
    if (x + 1 <= y && y <= -1) {
        SiteProjectors z = site_projectors(fld.coin_at(y));
        return li * F.between(x, y) * (z.zR - z.zL);
    }
    if (x == y && y <= -1) return -li * site_projectors(fld.coin_at(x)).zL;
    return Mat2::Zero();
}

Mat2 w_conj_kernel(PropagatorCocycle& Fs, Site x, Site y) {
    const CoinField& fld = Fs.field();
    const cd ls = Fs.lambda();
    if (y == 0) {
        if (x >= 1) return ls * Fs(x) * site_projectors(fld.coin_at(0)).zR.adjoint();
        if (x <= -1) return ls * Fs(x) * site_projectors(fld.coin_at(0)).zL.adjoint();
        return Mat2::Zero();
    }
    if (1 <= y && y <= x - 1) {
        SiteProjectors z = site_projectors(fld.coin_at(y));
        return ls * Fs.between(x, y) * (z.zR.adjoint() - z.zL.adjoint());
    }
    if (1 <= y && y == x) return -ls * site_projectors(fld.coin_at(x)).zL.adjoint();
    if (x + 1 <= y && y <= -1) {
        SiteProjectors z = site_projectors(fld.coin_at(y));
        return ls * Fs.between(x, y) * (z.zL.adjoint() - z.zR.adjoint());
    }
    if (x == y && y <= -1) return -ls * site_projectors(fld.coin_at(x)).zR.adjoint();
    return Mat2::Zero();
}

Mat2 w_kernel(PropagatorCocycle& Fs, Site x, Site y) { return w_conj_kernel(Fs, y, x).adjoint(); }

Mat2 w_kernel_explicit(PropagatorCocycle& Fs, Site x, Site y) {
    const CoinField& fld = Fs.field();
    const cd li = 1.0 / reflect(Fs.lambda());  // λ⁻¹, since Fs lives at λ*
    if (x == 0) {
        if (y >= 1) return li * site_projectors(fld.coin_at(0)).zR * Fs(y).adjoint();
        if (y <= -1) return li * site_projectors(fld.coin_at(0)).zL * Fs(y).adjoint();
        return Mat2::Zero();
    }
    // (F(x)*)⁻¹ F(y)* = (F(y) F(x)⁻¹)*
    if (1 <= x && x <= y - 1) {
        SiteProjectors z = site_projectors(fld.coin_at(x));
        return li * (z.zR - z.zL) * Fs.between(y, x).adjoint();
    }
    if (1 <= x && x == y) return -li * site_projectors(fld.coin_at(x)).zL;
    if (y + 1 <= x && x <= -1) {
        SiteProjectors z = site_projectors(fld.coin_at(x));
        return li * (z.zL - z.zR) * Fs.between(y, x).adjoint();
    }
    if (x == y && x <= -1) return -li * site_projectors(fld.coin_at(x)).zR;
    return Mat2::Zero();
}

// ----------------------------------------------------------------------------- solvers

SampledFunction solve_inhomogeneous(const CoinField& field, cd lambda, const StateVector& f, const Vec2& w, Window win) {
    require_nonzero(lambda);
    PropagatorCocycle F(field, lambda);
    SampledFunction out{win.lo, {}};
    for (Site x = win.lo; x <= win.hi; ++x) {
        Vec2 v = F(x) * w;
        for (const auto& [y, fy] : f.entries()) v += v_kernel(F, x, y) * fy;
        out.values.push_back(v);
    }
    return out;
}

SampledFunction conjugate_solver(const CoinField& field, cd lambda, const StateVector& f, const Vec2& w, Window win) {
    require_nonzero(lambda);
    PropagatorCocycle Fs(field, reflect(lambda));
    SampledFunction out{win.lo, {}};
    for (Site x = win.lo; x <= win.hi; ++x) {
        Vec2 v = Fs(x) * w;
        for (const auto& [y, fy] : f.entries()) v += w_conj_kernel(Fs, x, y) * fy;
        out.values.push_back(v);
    }
    return out;
}

Vec2 conjugate_recurrence_step(const CoinField& field, cd lambda, Site x, const Vec2& phi_x, const StateVector& f) {
    require_nonzero(lambda);
    const cd ls = reflect(lambda);
    const UnitaryCoin& c1 = field.coin_at(x + 1);
    const Mat2 C1 = c1.matrix(), C0 = field.coin_at(x).matrix();
    return transfer_matrix(field, x, ls) * phi_x - (ls / c1.a()) * pi_L() * C1 * f.at(x + 1) +
           (Mat2(Mat2::Identity() - pi_L() * C1 / c1.a())) * pi_R() * C0 * f.at(x);
}

StateVector left_inverse(const CoinField& field, cd lambda, const StateVector& f) {
    require_nonzero(lambda);
    PropagatorCocycle Fs(field, reflect(lambda));
    StateVector out;
    // w(x,y) vanishes unless x lies between 0 and y
    for (const auto& [y, fy] : f.entries()) {
        Site lo = std::min<Site>(0, y), hi = std::max<Site>(0, y);
        for (Site x = lo; x <= hi; ++x) out.add(x, w_kernel(Fs, x, y) * fy);
    }
    return out;
}

// ----------------------------------------------------------------------------- Fourier transform

Vec2 LaurentTransform::operator()(cd lambda) const {
    require_nonzero(lambda);
    Vec2 pos = Vec2::Zero(), neg = Vec2::Zero();
    const cd mu = 1.0 / lambda;
    for (int p = std::max(0, max_power()); p >= 0; --p) {
        auto it = coeffs_.find(p);
        pos = lambda * pos + (it == coeffs_.end() ? Vec2::Zero() : it->second);
    }
    for (int p = std::min(-1, min_power()); p <= -1; ++p) {
        auto it = coeffs_.find(p);
        neg = mu * neg + (it == coeffs_.end() ? Vec2::Zero() : it->second);
    }
    return pos + mu * neg;
}

Vec2 fourier_direct(const CoinField& field, const StateVector& f, cd lambda) {
    require_nonzero(lambda);
    PropagatorCocycle Fs(field, reflect(lambda));
    Vec2 s = Vec2::Zero();
    for (const auto& [x, fx] : f.entries()) s += Fs(x).adjoint() * fx;
    return s;
}

LaurentTransform qw_fourier(const CoinField& field, const StateVector& f) {
    const int R = static_cast<int>(f.radius());
    const int N = 2 * R + 3;
    std::vector<cd> nodes(N);
    std::vector<Vec2> vals(N);
    for (int k = 0; k < N; ++k) {
        nodes[k] = std::polar(1.0, 2.0 * kPi * k / N);
        vals[k] = fourier_direct(field, f, nodes[k]);
    }
    std::map<int, Vec2> c;
    for (int p = -R - 1; p <= R + 1; ++p) {
        Vec2 s = Vec2::Zero();
        for (int k = 0; k < N; ++k) s += vals[k] * std::polar(1.0, -2.0 * kPi * double(k) * p / N);
        c[p] = s / double(N);
    }
    return LaurentTransform(std::move(c));
}

} // namespace qwspec
