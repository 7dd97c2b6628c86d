// walk.hpp — the walk U(C) and its adjoint, cocycle eigenfunctions, the two kernel solvers,
// the left inverse W_λ and the QW-Fourier transform

#pragma once

#include "qwspec/transfer.hpp"

#include <map>
#include <vector>

namespace qwspec {

// Finitely supported C²-valued function on Z. Exact zeros (and |v| < 1e-300) are pruned.
class StateVector {
public:
    StateVector() = default;

    static StateVector delta(Site x, const Vec2& u) {
        StateVector s;
        s.set(x, u);
        return s;
    }

    void set(Site x, const Vec2& v);
    void add(Site x, const Vec2& v);
    Vec2 at(Site x) const;

    const std::map<Site, Vec2>& entries() const { return values_; }
    bool empty() const { return values_.empty(); }
    Site min_site() const { return values_.empty() ? 0 : values_.begin()->first; }
    Site max_site() const { return values_.empty() ? 0 : values_.rbegin()->first; }
    Site radius() const;  // max |x| over the support

    // compensated sums
    double norm() const;
    cd inner(const StateVector& g) const;  // Σ ⟨f(x), g(x)⟩ = Σ g(x)* f(x)

    StateVector operator+(const StateVector& g) const;
    StateVector operator-(const StateVector& g) const;
    StateVector operator*(cd s) const;

private:
    std::map<Site, Vec2> values_;
};

// values on a contiguous window [lo, hi]
struct SampledFunction {
    Site lo = 0;
    std::vector<Vec2> values;

    Site hi() const { return lo + static_cast<Site>(values.size()) - 1; }
    const Vec2& at(Site x) const { return values[static_cast<std::size_t>(x - lo)]; }
    Vec2& at(Site x) { return values[static_cast<std::size_t>(x - lo)]; }
    bool contains(Site x) const { return x >= lo && x <= hi(); }
};

struct Window {
    Site lo = -10, hi = 10;
};

StateVector apply_walk(const CoinField& field, const StateVector& psi);
StateVector apply_adjoint(const CoinField& field, const StateVector& phi);

// (UΨ)(x) and (U*Φ)(x) at one site of a sampled function (stencil must lie in the window)
Vec2 walk_at(const CoinField& field, const SampledFunction& psi, Site x);
Vec2 adjoint_at(const CoinField& field, const SampledFunction& phi, Site x);

// max over interior sites of ‖(U − λ)Ψ(x) − f(x)‖ (or (U* − conj λ)), scaled by max(1, ‖Ψ‖∞)
double eigen_residual(const CoinField& field, cd lambda, const SampledFunction& psi, const StateVector& f);
double conjugate_residual(const CoinField& field, cd lambda, const SampledFunction& phi, const StateVector& f);

// Φ_λ(u)(x) = F_λ(x)u
SampledFunction eigenfunction(const CoinField& field, cd lambda, const Vec2& u, Window w);

// kernel of V_λ (solves (U − λ)Ψ = f with Ψ(0) = w)
Mat2 v_kernel(PropagatorCocycle& F, Site x, Site y);
// kernel of W°_λ (solves (U* − conj λ)Φ = f with Φ(0) = w); Fs is the cocycle at λ* = 1/conj λ
Mat2 w_conj_kernel(PropagatorCocycle& Fs, Site x, Site y);
// kernel of the left inverse, built as w°(y,x)*
Mat2 w_kernel(PropagatorCocycle& Fs, Site x, Site y);
// the same kernel from its explicit cocycle form (independent construction)
Mat2 w_kernel_explicit(PropagatorCocycle& Fs, Site x, Site y);

// Ψ = Φ_λ(w) + V_λ f on the window
SampledFunction solve_inhomogeneous(const CoinField& field, cd lambda, const StateVector& f, const Vec2& w, Window win);
// Φ = Φ_{λ*}(w) + W°_λ f on the window
SampledFunction conjugate_solver(const CoinField& field, cd lambda, const StateVector& f, const Vec2& w, Window win);
// one step of the first-order recursion for the conjugate equation: Φ(x+1) from Φ(x), f(x), f(x+1)
Vec2 conjugate_recurrence_step(const CoinField& field, cd lambda, Site x, const Vec2& phi_x, const StateVector& f);

// W_λ f; finitely supported
StateVector left_inverse(const CoinField& field, cd lambda, const StateVector& f);

// f̂(λ) = Σ_x F_{λ*}(x)* f(x) as a Laurent polynomial in λ
class LaurentTransform {
public:
    LaurentTransform() = default;
    explicit LaurentTransform(std::map<int, Vec2> c) : coeffs_(std::move(c)) {}

    Vec2 operator()(cd lambda) const;  // Horner on both halves
    const std::map<int, Vec2>& coefficients() const { return coeffs_; }
    int max_power() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
    int min_power() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }

private:
    std::map<int, Vec2> coeffs_;
};

// direct evaluation of the sum
Vec2 fourier_direct(const CoinField& field, const StateVector& f, cd lambda);
// coefficients by an inverse DFT over 2R+3 roots of unity (R = support radius)
LaurentTransform qw_fourier(const CoinField& field, const StateVector& f);

} // namespace qwspec
