// linalg.hpp — 2x2 complex helpers shared by every module

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <utility>

namespace qwspec {

using cd   = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Site = std::int64_t;

inline constexpr double kPi = 3.14159265358979323846;
inline const cd I_unit{0.0, 1.0};

inline Mat2 pi_L() { Mat2 m; m << 1, 0, 0, 0; return m; }
inline Mat2 pi_R() { Mat2 m; m << 0, 0, 0, 1; return m; }
inline Vec2 e_L() { return Vec2(1, 0); }
inline Vec2 e_R() { return Vec2(0, 1); }

// λ* = 1/conj(λ), reflection across the unit circle
inline cd reflect(cd lambda) { return 1.0 / std::conj(lambda); }

// max-abs entry norm (uniform, scale-free at unit-modulus data)
template <class M>
inline double maxabs(const M& m) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

// residual scaled by max(1, scale)
inline double relative(double resid, double scale) { return resid / std::max(1.0, scale); }

// ⟨u,v⟩ = Σ u_i conj(v_i)
inline cd inner(const Vec2& u, const Vec2& v) { return v.dot(u); }

// u^⊥ = [−conj(u2), conj(u1)]
inline Vec2 perp(const Vec2& u) { return Vec2(-std::conj(u(1)), std::conj(u(0))); }

inline cd det2(const Vec2& u, const Vec2& v) { return u(0) * v(1) - u(1) * v(0); }

// unit eigenvector of a 2x2 for eigenvalue z: the rows of T − zI and, when the other
// eigenvalue is known, the columns of T − z_other·I give candidates; the smallest residual wins
inline Vec2 eigenvector2(const Mat2& t, cd z, const cd* z_other = nullptr) {
    Vec2 cand[4] = {Vec2(t(0, 1), z - t(0, 0)), Vec2(z - t(1, 1), t(1, 0)), Vec2::Zero(), Vec2::Zero()};
    if (z_other) {
        Mat2 m = t - *z_other * Mat2::Identity();
        cand[2] = m.col(0);
        cand[3] = m.col(1);
    }
    Vec2 best(1, 0);
    double best_res = std::numeric_limits<double>::infinity();
    for (const Vec2& c : cand) {
        double n = c.norm();
        if (n == 0.0) continue;
        Vec2 v = c / n;
        double res = (t * v - z * v).norm();
        if (res < best_res) {
            best_res = res;
            best = v;
        }
    }
    return best;
}

// eigenvalues of a 2x2, ordered by increasing modulus
inline std::pair<cd, cd> eigenvalues2(const Mat2& t) {
    cd tr = t.trace(), det = t.determinant();
    cd disc = std::sqrt(tr * tr / 4.0 - det);
    cd z1 = tr / 2.0 + disc, z2 = tr / 2.0 - disc;
    // recompute the small root from the product to avoid cancellation
    if (std::abs(z1) < std::abs(z2)) std::swap(z1, z2);
    if (z1 != cd(0)) z2 = det / z1;
    return {z2, z1};
}

inline Mat2 hermitian_part(const Mat2& m) { return 0.5 * (m + m.adjoint()); }

// smallest eigenvalue of a Hermitian 2x2 (the Hermitian part is taken first)
inline double min_eigenvalue(const Mat2& m) {
    Mat2 h = hermitian_part(m);
    double a = h(0, 0).real(), d = h(1, 1).real();
    double off = std::abs(h(0, 1));
    return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + off * off);
}

inline double max_eigenvalue(const Mat2& m) {
    Mat2 h = hermitian_part(m);
    double a = h(0, 0).real(), d = h(1, 1).real();
    double off = std::abs(h(0, 1));
    return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + off * off);
}

// Rank-one defect |det M| / ‖M‖² (0 for the zero matrix)
inline double rank_one_defect(const Mat2& m) {
    double s = maxabs(m);
    if (s == 0.0) return 0.0;
    return std::abs(m.determinant()) / (s * s);
}

} // namespace qwspec
