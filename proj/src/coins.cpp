#include "qwspec/coins.hpp"

#include <sstream>

namespace qwspec {

namespace {

// |a| below this is treated as a = 0
constexpr double kMinAbsA = 1e-12;

std::string describe(const Mat2& m, double& resid, double& abs_a) {
    resid = UnitaryCoin::unitarity_residual(m);
    abs_a = std::abs(m(0, 0));
    if (!std::isfinite(resid)) return "non-finite entries";
    if (resid > kUnitarityTol) {
        std::ostringstream os;
        os << "not unitary (residual " << resid << ")";
        return os.str();
    }
    if (abs_a <= kMinAbsA) return "a = 0 violates the standing assumption";
    return {};
}

} // namespace

double UnitaryCoin::unitarity_residual(const Mat2& m) {
    return maxabs(Mat2(m * m.adjoint() - Mat2::Identity()));
}

UnitaryCoin::UnitaryCoin(cd a, cd b, cd c, cd d) : a_(a), b_(b), c_(c), d_(d), delta_(a * d - b * c) {
    Mat2 m;
    m << a, b, c, d;
    double resid = 0.0, abs_a = 0.0;
    std::string why = describe(m, resid, abs_a);
    if (!why.empty()) throw InvalidCoin("UnitaryCoin: " + why);
}

UnitaryCoin UnitaryCoin::su2(cd alpha, cd beta) {
    return UnitaryCoin(alpha, beta, -std::conj(beta), std::conj(alpha));
}

UnitaryCoin UnitaryCoin::reorthonormalized(const Mat2& m) {
    // polar factor U = W V* from the SVD m = W S V*
    Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat2 u = svd.matrixU() * svd.matrixV().adjoint();
    return UnitaryCoin(u);
}

Mat2 UnitaryCoin::matrix() const {
    Mat2 m;
    m << a_, b_, c_, d_;
    return m;
}

bool UnitaryCoin::is_su2(double tol) const {
    return std::abs(delta_ - 1.0) <= tol && std::abs(d_ - std::conj(a_)) <= tol &&
           std::abs(c_ + std::conj(b_)) <= tol;
}

SiteProjectors site_projectors(const UnitaryCoin& coin) {
    if (std::abs(coin.a()) <= kMinAbsA || std::abs(coin.d()) <= kMinAbsA)
        throw InvalidCoin("site_projectors: a = 0 or d = 0");
    SiteProjectors p;
    p.zL << 1, 0, -coin.c() / coin.d(), 0;
    p.zR << 0, -coin.b() / coin.a(), 0, 1;
    return p;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << (accepted ? "accepted" : "rejected") << "; max unitarity residual " << max_unitarity_residual
       << ", min |a| " << min_abs_a;
    for (const auto& is : issues) os << "; " << is.where << ": " << is.reason;
    return os.str();
}

ValidationReport validate_field(const RawCoinField& raw) {
    ValidationReport rep;
    auto check = [&](const Mat2& m, const std::string& where, Site x) {
        SiteIssue is;
        is.where = where;
        is.site  = x;
        is.reason = describe(m, is.unitarity_residual, is.abs_a);
        if (std::isfinite(is.unitarity_residual))
            rep.max_unitarity_residual = std::max(rep.max_unitarity_residual, is.unitarity_residual);
        rep.min_abs_a = std::min(rep.min_abs_a, is.abs_a);
        if (!is.reason.empty()) {
            rep.accepted = false;
            rep.issues.push_back(is);
        }
    };
    check(raw.left_tail, "left_tail", 0);
    check(raw.right_tail, "right_tail", 0);
    for (const auto& [x, m] : raw.overrides) check(m, "site " + std::to_string(x), x);
    return rep;
}

CoinField::CoinField(UnitaryCoin left, UnitaryCoin right, std::map<Site, UnitaryCoin> overrides)
    : left_(left), right_(right), overrides_(std::move(overrides)) {
    for (const auto& [x, c] : overrides_) {
        (void)c;
        if (x >= 0) n_plus_ = std::max<Site>(n_plus_, x + 1);
        if (x <= 0) n_minus_ = std::max<Site>(n_minus_, 1 - x);
    }
}

CoinField CoinField::two_phase(const UnitaryCoin& c0, const UnitaryCoin& plus, const UnitaryCoin& minus) {
    return CoinField(minus, plus, {{0, c0}});
}

CoinField CoinField::from_raw(const RawCoinField& raw, bool reorthonormalize) {
    if (reorthonormalize) {
        std::map<Site, UnitaryCoin> ov;
        for (const auto& [x, m] : raw.overrides) ov.emplace(x, UnitaryCoin::reorthonormalized(m));
        return CoinField(UnitaryCoin::reorthonormalized(raw.left_tail),
                         UnitaryCoin::reorthonormalized(raw.right_tail), std::move(ov));
    }
    ValidationReport rep = validate_field(raw);
    if (!rep.accepted) throw InvalidCoin("coin field " + rep.summary());
    std::map<Site, UnitaryCoin> ov;
    for (const auto& [x, m] : raw.overrides) ov.emplace(x, UnitaryCoin(m));
    return CoinField(UnitaryCoin(raw.left_tail), UnitaryCoin(raw.right_tail), std::move(ov));
}

const UnitaryCoin& CoinField::coin_at(Site x) const {
    if (x >= n_plus_) return right_;
    if (x <= -n_minus_) return left_;
    auto it = overrides_.find(x);
    if (it != overrides_.end()) return it->second;
    return x < 0 ? left_ : right_;
}

bool CoinField::is_homogeneous() const {
    if (!(left_ == right_)) return false;
    for (const auto& [x, c] : overrides_) {
        (void)x;
        if (!(c == left_)) return false;
    }
    return true;
}

} // namespace qwspec
