// transfer.hpp — transfer matrices T_λ(x), inverses, cocycle F_λ(x), alternative matrix S_λ(x)

#pragma once

#include "qwspec/coins.hpp"

#include <array>
#include <vector>

namespace qwspec {

// T_λ(x) from the coins at x and x+1
Mat2 transfer_matrix(const UnitaryCoin& cx, const UnitaryCoin& cx1, cd lambda);
Mat2 transfer_inverse(const UnitaryCoin& cx, const UnitaryCoin& cx1, cd lambda);

Mat2 transfer_matrix(const CoinField& field, Site x, cd lambda);
Mat2 transfer_inverse(const CoinField& field, Site x, cd lambda);

// S_λ(x) = (1/a_x) [[λ, −b_x],[c_x, λ⁻¹Δ_x]]
Mat2 alt_transfer(const CoinField& field, Site x, cd lambda);

// Memoised F_λ(x): F(0)=I, F(x)=T(x−1)···T(0) (x>=1), F(x)=T(x)⁻¹···T(−1)⁻¹ (x<=−1).
// Not thread-safe: confine an instance to one thread.
class PropagatorCocycle {
public:
    // fast_path: diagonalise the tail matrix beyond the window (+64 sites)
    PropagatorCocycle(const CoinField& field, cd lambda, bool fast_path = true);

    Mat2 operator()(Site x);
    // F(x)F(y)⁻¹ as an explicit product of transfer factors
    Mat2 between(Site x, Site y) const;
    // F(x)⁻¹ as an explicit product of transfer factors
    Mat2 inverse(Site x) const;

    cd lambda() const { return lambda_; }
    const CoinField& field() const { return *field_; }

private:
    Mat2 tail_power(const UnitaryCoin& tail, Site steps, const Mat2& start) const;

    const CoinField* field_;
    cd lambda_;
    bool fast_;
    std::vector<Mat2> pos_;  // F(0), F(1), ...
    std::vector<Mat2> neg_;  // F(0), F(−1), ...
};

Mat2 propagator(const CoinField& field, Site x, cd lambda);

// Residuals of the cocycle identity list at one (x, λ)
struct IdentityResiduals {
    // [0..7] items (1)–(8); [8] conjugated-cocycle sandwich; [9] C(x)F(x) = λπ_L F(x−1) + λπ_R F(x+1)
    std::array<double, 10> r{};
    double det_T = 0.0;  // det T_λ(x) · a_{x+1}/d_x − 1
    double det_S = 0.0;  // det S_λ(x) · a_x/d_x − 1
    double max() const;
    static const std::array<const char*, 10>& names();
};

// residuals are relative: divided by max(1, product of the factor norms)
IdentityResiduals identity_suite(const CoinField& field, Site x, cd lambda);

// Jf(x) = [f_L(x−1), f_R(x)] for the two cocycle solutions F(x)u, F(x)v; returns |det[Jf,Jg]| on [lo,hi]
std::vector<double> wronskian(const CoinField& field, cd lambda, const Vec2& u, const Vec2& v, Site lo, Site hi);

// partial sums Σ_{x=1..N} ‖F_λ(x)‖²_HS until they exceed `target` (or N = max_sites)
std::vector<double> hs_partial_sums(const CoinField& field, cd lambda, double target, Site max_sites = 100000);

} // namespace qwspec
