// resolvent.hpp — decaying directions, x₀(λ) = R_λ(0,0), the Green kernel, the Carathéodory
// function x(λ) = I + 2λx₀(λ), a Neumann-series oracle and the homogeneous closed forms

#pragma once

#include "qwspec/walk.hpp"

namespace qwspec {

// eigen-data of the constant-coin transfer matrix, |z₊| < 1 < |z₋|
struct TailSplit {
    cd z_plus, z_minus;
    Vec2 w_plus, w_minus;  // unit eigenvectors
    cd alpha;              // SU(2)-reduced α (coin = e^{iφ}[[α,β],[−β̄,ᾱ]])
    cd mu;                 // λe^{−iφ}
};

// αz₊ from the four-region branch table of (αz)² − 2J(αz) + |α|² = 0, J = (μ+μ⁻¹)/2
cd branch_alpha_z_plus(cd mu, double abs_alpha);

TailSplit tail_eigensplit(const UnitaryCoin& tail, cd lambda);

struct DecayingDirections {
    cd lambda;
    Vec2 v_plus, v_minus;
    TailSplit right, left;
    cd det() const { return det2(v_plus, v_minus); }
};

// v₊ = F(N₊)⁻¹w₊(right tail), v₋ = F(−N₋)⁻¹w₋(left tail), normalised.
// Throws DependentDirections when |det[v₊ v₋]| < 1e-10 unless check_independent is false.
DecayingDirections decaying_directions(const CoinField& field, cd lambda, bool check_independent = true);

struct DecayCertificate {
    double max_ratio_plus = 0.0;   // max ‖F(x+1)v₊‖/‖F(x)v₊‖ over right-tail sites
    double max_ratio_minus = 0.0;  // max ‖F(x−1)v₋‖/‖F(x)v₋‖ over left-tail sites
    int sites_plus = 0, sites_minus = 0;  // tail sites actually sampled
    double alignment_plus = 0.0;   // |det[F(N₊)v₊/‖·‖, w₊]|
    double alignment_minus = 0.0;  // |det[F(−N₋)v₋/‖·‖, w₋]|
    bool decaying() const { return max_ratio_plus < 1.0 && max_ratio_minus < 1.0; }
};

// samples up to `sites` tail sites on each side (fewer when roundoff growth would dominate)
DecayCertificate decay_certificate(const CoinField& field, const DecayingDirections& d, int sites = 20);

struct ResolventData {
    cd lambda;
    Vec2 v_plus, v_minus;
    Mat2 x0;        // R_λ(0,0)
    Mat2 x_carath;  // I + 2λx₀
};

ResolventData x0_via_directions(const CoinField& field, cd lambda);
// the same matrix through the 2x2 coefficient system for (a_L,b_L), (a_R,b_R)
Mat2 x0_via_coefficients(const CoinField& field, const DecayingDirections& d);

// geometric series in λU* (|λ|<1) or λ⁻¹U (|λ|>1); R_λ(x,y) columns read off at site x
Mat2 neumann_green(const CoinField& field, cd lambda, Site x, Site y, double tol = 1e-12, int cap = 10000);
inline Mat2 neumann_x0(const CoinField& field, cd lambda, double tol = 1e-12, int cap = 10000) {
    return neumann_green(field, lambda, 0, 0, tol, cap);
}

struct GreenKernelEntry {
    Site x = 0, y = 0;
    Mat2 matrix;
    double rank_defect = 0.0;        // |det| / (‖F(x)‖‖A‖‖F_{λ*}(y)‖)², off-diagonal only
    double diagonal_mismatch = 0.0;  // relative gap between the two diagonal forms
};

// Green kernel assembled from x₀ and the cocycles at λ and λ*
class GreenFunction {
public:
    GreenFunction(const CoinField& field, cd lambda);
    GreenFunction(const CoinField& field, ResolventData data);

    GreenKernelEntry entry(Site x, Site y);
    // (R(λ)f)(x) for x on the window
    SampledFunction apply(const StateVector& f, Window w);
    // ⟨R(λ)f, g⟩
    cd inner(const StateVector& f, const StateVector& g);
    const ResolventData& data() const { return data_; }

private:
    const CoinField* field_;
    ResolventData data_;
    PropagatorCocycle F_, Fs_;
    Mat2 AL_, AR_;
};

GreenKernelEntry green_kernel(const CoinField& field, cd lambda, Site x, Site y);

struct Caratheodory {
    Mat2 x;        // I + 2λx₀(λ)
    Mat2 re_part;  // (x + x*)/2
};

Caratheodory caratheodory(const CoinField& field, cd lambda);
// λx₀(λ) − λ*x₀(λ*)
Mat2 re_part_via_reflection(const CoinField& field, cd lambda);
// ‖x₀(λ)* + λ*(I + λ*x₀(λ*))‖ / max(1, ‖x₀‖)
double conjugation_check(const CoinField& field, cd lambda);

struct RankOneCertificate {
    double left = 0.0;   // |det(x₀ + λ⁻¹z_L(0))| / ‖·‖²
    double right = 0.0;  // same with z_R(0)
};
RankOneCertificate rank_one_certificates(const CoinField& field, const ResolventData& d);

// ---- constant SU(2) coin [[α,β],[−β̄,ᾱ]]

Mat2 homogeneous_x0(const UnitaryCoin& coin, cd lambda);
Mat2 homogeneous_caratheodory(const UnitaryCoin& coin, cd lambda);

// translation invariance of x₀ + λ⁻¹z_L(0) under T_C(λ)·(·)·T_C(λ*)*;
// `literal` drops the λ⁻¹ in front of z_L(0)
struct TranslationResiduals {
    double with_inverse_lambda = 0.0;
    double literal = 0.0;
};
TranslationResiduals translation_identity_residuals(const UnitaryCoin& coin, cd lambda);

} // namespace qwspec
