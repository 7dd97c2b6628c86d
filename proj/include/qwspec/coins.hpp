// coins.hpp — unitary coins, coin fields (constant tails + finite overrides), site matrices z_L, z_R

#pragma once

#include "qwspec/errors.hpp"
#include "qwspec/linalg.hpp"

#include <map>
#include <string>
#include <vector>

namespace qwspec {

inline constexpr double kUnitarityTol = 1e-12;

// C = [[a,b],[c,d]] with C C* = I and a != 0 (hence d != 0)
class UnitaryCoin {
public:
    UnitaryCoin() : a_(1), b_(0), c_(0), d_(1), delta_(1) {}
    UnitaryCoin(cd a, cd b, cd c, cd d);
    explicit UnitaryCoin(const Mat2& m) : UnitaryCoin(m(0, 0), m(0, 1), m(1, 0), m(1, 1)) {}

    // [[α,β],[−conj β, conj α]]; requires |α|²+|β|² = 1
    static UnitaryCoin su2(cd alpha, cd beta);
    // nearest unitary (polar factor); only on explicit request
    static UnitaryCoin reorthonormalized(const Mat2& m);
    static double unitarity_residual(const Mat2& m);

    cd a() const { return a_; }
    cd b() const { return b_; }
    cd c() const { return c_; }
    cd d() const { return d_; }
    cd delta() const { return delta_; }
    Mat2 matrix() const;

    // det = 1 within tol (then d = conj a, c = −conj b)
    bool is_su2(double tol = 1e-12) const;

    bool operator==(const UnitaryCoin& o) const {
        return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
    }

private:
    cd a_, b_, c_, d_, delta_;
};

struct SiteProjectors {
    Mat2 zL;  // [[1,0],[−c/d,0]]
    Mat2 zR;  // [[0,−b/a],[0,1]]
};

SiteProjectors site_projectors(const UnitaryCoin& coin);

// unvalidated field description, as read from a config
struct RawCoinField {
    Mat2 left_tail  = Mat2::Identity();
    Mat2 right_tail = Mat2::Identity();
    std::map<Site, Mat2> overrides;
};

struct SiteIssue {
    std::string where;   // "left_tail", "right_tail" or "site <x>"
    Site site = 0;
    double unitarity_residual = 0.0;
    double abs_a = 0.0;
    std::string reason;
};

struct ValidationReport {
    bool accepted = true;
    double max_unitarity_residual = 0.0;
    double min_abs_a = 1.0;
    std::vector<SiteIssue> issues;
    std::string summary() const;
};

ValidationReport validate_field(const RawCoinField& raw);

// Coin field: left tail for x <= −N_−, right tail for x >= N_+, overrides in between.
// Window sites without an override use the left tail for x < 0, the right tail otherwise.
class CoinField {
public:
    CoinField() = default;
    CoinField(UnitaryCoin left, UnitaryCoin right, std::map<Site, UnitaryCoin> overrides = {});

    static CoinField homogeneous(const UnitaryCoin& c) { return CoinField(c, c); }
    // C(x) = C_+ (x >= 1), C(0) = C_0, C(x) = C_− (x <= −1)
    static CoinField two_phase(const UnitaryCoin& c0, const UnitaryCoin& plus, const UnitaryCoin& minus);
    // throws InvalidCoin carrying the validation summary
    static CoinField from_raw(const RawCoinField& raw, bool reorthonormalize = false);

    const UnitaryCoin& coin_at(Site x) const;
    const UnitaryCoin& left_tail() const { return left_; }
    const UnitaryCoin& right_tail() const { return right_; }
    const std::map<Site, UnitaryCoin>& overrides() const { return overrides_; }

    // T(x) is the pure right-tail matrix for x >= N_+, pure left-tail for x <= −N_− − 1
    Site n_plus() const { return n_plus_; }
    Site n_minus() const { return n_minus_; }

    // every site carries the same coin
    bool is_homogeneous() const;

private:
    UnitaryCoin left_, right_;
    std::map<Site, UnitaryCoin> overrides_;
    Site n_plus_ = 1, n_minus_ = 1;
};

inline const UnitaryCoin& coin_at(const CoinField& field, Site x) { return field.coin_at(x); }

} // namespace qwspec
