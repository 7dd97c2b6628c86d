// spectral.hpp — the matrix-valued spectral measure Σ: radial-limit reconstruction, point masses,
// closed forms (constant coin, two-phase model), moments and expansion-theorem checks

#pragma once

#include "qwspec/resolvent.hpp"

#include <array>
#include <functional>
#include <optional>

namespace qwspec {

// densities are w.r.t. normalised Lebesgue measure d̄ζ = dθ/2π
struct DensitySample {
    double theta = 0.0;
    Mat2 density = Mat2::Zero();
    double weight = 0.0;  // quadrature weight (of d̄ζ)
};

struct PointMass {
    double theta = 0.0;
    Mat2 mass = Mat2::Zero();
    cd zeta() const { return std::polar(1.0, theta); }
};

struct Arc {
    double lo = 0.0, hi = 0.0;  // angles, lo < hi
};

struct SpectralMeasure {
    std::vector<DensitySample> ac;
    std::vector<PointMass> atoms;
    std::vector<Arc> segments;  // angular ranges covered by the ac nodes

    // ∫ h dΣ by quadrature on the ac part plus exact atom sums
    Mat2 integrate(const std::function<cd(cd)>& h) const;
    Mat2 total_mass() const;
    double min_eigenvalue() const;
};

// ---- quadrature

// cos-mapped midpoint rule on [lo, hi]: θ = mid − half·cos φ; spectrally accurate for
// square-root-type endpoint behaviour. Weights are for d̄ζ.
std::vector<std::pair<double, double>> arc_nodes(double lo, double hi, int n);

// ---- radial limits

struct RadialOptions {
    int k_min = 6, k_max = 18;   // ε_k = 2^{−k}
    double conv_tol = 1e-6;      // on successive Richardson estimates (relative)
    double blowup_ratio = 1.5;   // raw estimates growing by more than this per halving flag an atom
};

struct RadialSample {
    double theta = 0.0;
    Mat2 density = Mat2::Zero();  // Richardson-extrapolated Re x(rζ)
    double increment = 0.0;       // ‖R_k − R_{k−1}‖ at the last step
    bool converged = false;
    bool near_point_mass = false;
};

RadialSample radial_density(const CoinField& field, double theta, const RadialOptions& opt = {});
// uniform grid θ_j = 2πj/N
std::vector<RadialSample> ac_density(const CoinField& field, int grid_size, const RadialOptions& opt = {});
// uniform-weight measure from samples; samples flagged near a point mass are dropped
SpectralMeasure measure_from_samples(const std::vector<RadialSample>& samples);

// ---- point masses

// both tails hyperbolic at e^{iθ} (no a.c. spectrum from either tail there)
bool in_spectral_gap(const CoinField& field, double theta, double margin = 1e-9);
// |det[v₊ v₋]| just inside the circle (r = 1 − 1e-10)
double direction_determinant(const CoinField& field, double theta);
// local minima of |det[v₊ v₋]| over the gap part of a uniform grid, refined by golden section;
// kept when the refined value is below 1e-7
std::vector<double> eigenvalue_candidates(const CoinField& field, int grid_size = 4096);
// Richardson-extrapolated ((1−r)/(1+r)) Re x(re^{iθ})
Mat2 point_mass_estimate(const CoinField& field, double theta, const RadialOptions& opt = {});
// estimates at each candidate; masses with max eigenvalue below 1e-10 are discarded
std::vector<PointMass> point_masses(const CoinField& field, const std::vector<double>& candidates,
                                    const RadialOptions& opt = {});

// angles where some tail band {|Re ζe^{−iφ}| ≤ |α|} ends, sorted in [0, 2π)
std::vector<double> band_edges(const CoinField& field);
// radial-limit density on cos-mapped nodes between band edges (≈ grid_size in total)
// plus scanned point masses; angles are not wrapped (segments may extend past 2π)
SpectralMeasure reconstruct_measure(const CoinField& field, int grid_size, const RadialOptions& opt = {});

// ---- constant SU(2) coin

Mat2 homogeneous_density(const UnitaryCoin& coin, double theta);
// nodes_per_arc on each of the two support arcs (uniform grid of 2·nodes when β = 0)
SpectralMeasure homogeneous_measure(const UnitaryCoin& coin, int nodes_per_arc = 50000);

// ---- two-phase model: C(x) = C_+ (x>=1), C_0 (x=0), C_− (x<=−1), C_± = [[α_±,β],[−β̄,ᾱ_±]]

class TwoPhaseModel {
public:
    // throws AssumptionViolation naming the failing clause
    TwoPhaseModel(const UnitaryCoin& c0, const UnitaryCoin& plus, const UnitaryCoin& minus);
    static TwoPhaseModel from_field(const CoinField& field);

    double rho() const { return rho_; }
    double s() const { return s_; }
    double t() const { return t_; }
    double x_star() const { return x_star_; }
    double y_star() const { return y_star_; }
    cd zeta_star() const { return {x_star_, y_star_}; }
    double mass_prefactor() const;

    Mat2 density(double theta) const;
    // masses at ζ_*, −ζ_*, conj ζ_*, −conj ζ_*
    std::array<PointMass, 4> masses() const;
    // 1 − s − J(ζ)Z₋(ζ), Z₋ the larger root of z² − 2Jz + ρ²
    cd eigen_function(cd zeta) const;
    // residue form of the mass at a zero of eigen_function (upper half-plane eigenvalues)
    Mat2 residue_mass(cd zeta) const;
    std::array<Arc, 2> support_arcs() const;
    SpectralMeasure measure(int nodes_per_arc = 50000) const;

private:
    cd a0_, b0_, beta_;
    double rho_, s_, t_, x_star_, y_star_;
};

SpectralMeasure two_phase_measure(const UnitaryCoin& c0, const UnitaryCoin& plus, const UnitaryCoin& minus,
                                  int nodes_per_arc = 50000);

// closed-form measure when the field is a constant SU(2) coin or a two-phase model
std::optional<SpectralMeasure> closed_form_measure(const CoinField& field, int nodes_per_arc = 50000);

// ---- moments and expansion-theorem checks

using MomentSequence = std::map<int, Mat2>;

MomentSequence moments(const SpectralMeasure& m, int n_max);
// entry (r,c) = ⟨Uⁿ(δ₀⊗e_c)(0), e_r⟩; U* for n < 0
Mat2 exact_moment_oracle(const CoinField& field, int n);

// residuals relative to max(1, ‖f‖‖g‖)
double parseval_check(const CoinField& field, const SpectralMeasure& m, const StateVector& f, const StateVector& g);
double inversion_check(const CoinField& field, const SpectralMeasure& m, const StateVector& f, Site x);
double resolvent_representation_check(const CoinField& field, const SpectralMeasure& m, const StateVector& f,
                                      const StateVector& g, cd lambda);

struct SupportDescription {
    std::vector<Arc> arcs;
    std::vector<double> eigen_angles;
};
SupportDescription spectrum_support(const SpectralMeasure& m, double threshold = 1e-8);
// F_ζ(x) Σ({ζ}) f̂(ζ)
Vec2 eigenprojection(const CoinField& field, const PointMass& atom, const StateVector& f, Site x);

// ‖F_ζ(x)v‖ for the cocycle eigenfunction over `sites` sites on each side
struct EigenfunctionDecay {
    bool monotone_plus = false, monotone_minus = false;
    double ratio_plus = 0.0, ratio_minus = 0.0;  // ‖Φ(±sites)‖ / ‖Φ(±1)‖
    double alignment = 0.0;                      // max |det[v, v_±]| (v must lie along both)
    std::vector<double> norms;                   // on [−sites, sites]
};
EigenfunctionDecay eigenfunction_decay(const CoinField& field, double theta, const Vec2& v, int sites = 30);

// ---- Cayley-transform quantities (verification identities)

// H_f(λ) = ⟨(U−λ)⁻¹(U+λ)f, f⟩ = ‖f‖² + 2λ⟨R(λ)f, f⟩
cd herglotz_form(const CoinField& field, cd lambda, const StateVector& f);
// ∫ (ζ+λ)/(ζ−λ) ⟨dΣ f̂, f̂⟩
cd herglotz_from_measure(const CoinField& field, const SpectralMeasure& m, cd lambda, const StateVector& f);
// the entire part h_f(λ) = H_f(λ) − 2λ⟨x₀(λ)f̂(λ), f̂(λ*)⟩, from finite cocycle sums (any λ ≠ 0)
cd h_form(const CoinField& field, cd lambda, const StateVector& f);

} // namespace qwspec
