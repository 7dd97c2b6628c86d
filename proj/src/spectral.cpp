#include "qwspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qwspec {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    return t < 0 ? t + kTwoPi : t;
}

// ⟨M u, v⟩ = v* M u
cd form(const Mat2& m, const Vec2& u, const Vec2& v) { return v.dot(m * u); }

Mat2 carath_re(const CoinField& field, cd lambda) {
    return hermitian_part(x0_via_directions(field, lambda).x_carath);
}

// F_ζ(x) by explicit products (one site at a time; no caching needed for small |x|)
Mat2 cocycle_at(const CoinField& field, Site x, cd lambda) {
    Mat2 f = Mat2::Identity();
    if (x > 0)
        for (Site k = 0; k < x; ++k) f = transfer_matrix(field, k, lambda) * f;
    else
        for (Site k = -1; k >= x; --k) f = transfer_inverse(field, k, lambda) * f;
    return f;
}

// angle of the SU(2) reduction: Re(ζe^{−iφ}) with e^{2iφ} = Δ
double reduced_real_part(const UnitaryCoin& c, double theta) {
    double phi = 0.5 * std::arg(c.delta());
    return std::cos(theta - phi);
}

} // namespace

// ---------------------------------------------------------------- measure container

Mat2 SpectralMeasure::integrate(const std::function<cd(cd)>& h) const {
    Mat2 acc = Mat2::Zero();
    for (const auto& s : ac) acc += (s.weight * h(std::polar(1.0, s.theta))) * s.density;
    for (const auto& a : atoms) acc += h(a.zeta()) * a.mass;
    return acc;
}

Mat2 SpectralMeasure::total_mass() const {
    return integrate([](cd) { return cd(1.0); });
}

double SpectralMeasure::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : ac) m = std::min(m, qwspec::min_eigenvalue(s.density));
    for (const auto& a : atoms) m = std::min(m, qwspec::min_eigenvalue(a.mass));
    return m;
}

std::vector<std::pair<double, double>> arc_nodes(double lo, double hi, int n) {
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(n));
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int k = 0; k < n; ++k) {
        double phi = (k + 0.5) * kPi / n;
        out.emplace_back(mid - half * std::cos(phi), half * std::sin(phi) * (kPi / n) / kTwoPi);
    }
    return out;
}

// ---------------------------------------------------------------- radial limits

RadialSample radial_density(const CoinField& field, double theta, const RadialOptions& opt) {
    RadialSample out;
    out.theta = theta;
    const cd zeta = std::polar(1.0, theta);
    std::vector<Mat2> raw;
    for (int k = opt.k_min; k <= opt.k_max; ++k) {
        double r = 1.0 - std::ldexp(1.0, -k);
        try {
            raw.push_back(carath_re(field, r * zeta));
        } catch (const DependentDirections&) {
            // only happens essentially on top of an eigenvalue
            out.near_point_mass = true;
            break;
        } catch (const DegenerateSpectralParameter&) {
            out.near_point_mass = true;
            break;
        }
    }
    if (raw.size() < 2) {
        if (!raw.empty()) out.density = raw.back();
        return out;
    }

    std::vector<Mat2> rich;
    for (std::size_t k = 1; k < raw.size(); ++k) rich.push_back(2.0 * raw[k] - raw[k - 1]);
    out.density = rich.back();
    // outside the asymptotic regime (within ~ε of a band edge) the extrapolation can leave the
    // PSD cone; the raw boundary value is PSD by construction
    if (qwspec::min_eigenvalue(out.density) < -1e-12) out.density = raw.back();
    if (rich.size() >= 2) {
        out.increment = maxabs(rich.back() - rich[rich.size() - 2]);
        out.converged = out.increment <= opt.conv_tol * std::max(1.0, maxabs(out.density));
    }

    // a 1/ε blow-up over the last three halvings marks an atom under the sample
    if (raw.size() >= 4) {
        int growing = 0;
        for (std::size_t k = raw.size() - 3; k < raw.size(); ++k) {
            double prev = maxabs(raw[k - 1]);
            if (prev > 0 && maxabs(raw[k]) > opt.blowup_ratio * prev) ++growing;
        }
        if (growing == 3) out.near_point_mass = true;
    }
    if (out.near_point_mass) out.converged = false;
    return out;
}

std::vector<RadialSample> ac_density(const CoinField& field, int grid_size, const RadialOptions& opt) {
    std::vector<RadialSample> out;
    out.reserve(static_cast<std::size_t>(grid_size));
    for (int j = 0; j < grid_size; ++j) out.push_back(radial_density(field, kTwoPi * j / grid_size, opt));
    return out;
}

SpectralMeasure measure_from_samples(const std::vector<RadialSample>& samples) {
    SpectralMeasure m;
    m.segments.push_back({0.0, kTwoPi});
    if (samples.empty()) return m;
    const double w = 1.0 / static_cast<double>(samples.size());
    for (const auto& s : samples) {
        if (s.near_point_mass) continue;
        m.ac.push_back({s.theta, hermitian_part(s.density), w});
    }
    return m;
}

// ---------------------------------------------------------------- point masses

bool in_spectral_gap(const CoinField& field, double theta, double margin) {
    for (const UnitaryCoin* c : {&field.left_tail(), &field.right_tail()})
        if (std::abs(reduced_real_part(*c, theta)) <= std::abs(c->a()) + margin) return false;
    return true;
}

double direction_determinant(const CoinField& field, double theta) {
    try {
        return std::abs(decaying_directions(field, (1.0 - 1e-10) * std::polar(1.0, theta), false).det());
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

std::vector<double> eigenvalue_candidates(const CoinField& field, int grid_size) {
    const double h = kTwoPi / grid_size;
    std::vector<double> g(static_cast<std::size_t>(grid_size), std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < grid_size; ++j)
        if (in_spectral_gap(field, j * h)) g[static_cast<std::size_t>(j)] = direction_determinant(field, j * h);

    auto objective = [&](double t) {
        if (!in_spectral_gap(field, t)) return std::numeric_limits<double>::infinity();
        double v = direction_determinant(field, t);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<double> out;
    for (int j = 0; j < grid_size; ++j) {
        double gj = g[static_cast<std::size_t>(j)];
        if (std::isnan(gj)) continue;
        double gl = g[static_cast<std::size_t>((j + grid_size - 1) % grid_size)];
        double gr = g[static_cast<std::size_t>((j + 1) % grid_size)];
        if (std::isnan(gl) && std::isnan(gr)) continue;
        if ((!std::isnan(gl) && gl < gj) || (!std::isnan(gr) && gr < gj)) continue;

        // golden section on the bracketing cells
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = (j - 1) * h, b = (j + 1) * h;
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double fc = objective(c), fd = objective(d);
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            if (fc < fd) {
                b = d; d = c; fd = fc;
                c = b - inv_phi * (b - a); fc = objective(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + inv_phi * (b - a); fd = objective(d);
            }
        }
        double t = 0.5 * (a + b);
        if (objective(t) >= 1e-7) continue;
        t = wrap_angle(t);
        bool dup = std::any_of(out.begin(), out.end(), [&](double u) {
            double dlt = std::abs(u - t);
            return std::min(dlt, kTwoPi - dlt) < 1e-9;
        });
        if (!dup) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Mat2 point_mass_estimate(const CoinField& field, double theta, const RadialOptions& opt) {
    const cd zeta = std::polar(1.0, theta);
    auto scaled = [&](int k) {
        double eps = std::ldexp(1.0, -k), r = 1.0 - eps;
        return Mat2(((1.0 - r) / (1.0 + r)) * carath_re(field, r * zeta));
    };
    Mat2 fine = scaled(opt.k_max), coarse = scaled(opt.k_max - 1);
    return hermitian_part(2.0 * fine - coarse);
}

std::vector<PointMass> point_masses(const CoinField& field, const std::vector<double>& candidates,
                                    const RadialOptions& opt) {
    std::vector<PointMass> out;
    for (double t : candidates) {
        Mat2 m = point_mass_estimate(field, t, opt);
        if (max_eigenvalue(m) < 1e-10) continue;
        out.push_back({t, m});
    }
    return out;
}

std::vector<double> band_edges(const CoinField& field) {
    std::vector<double> e;
    for (const UnitaryCoin* c : {&field.left_tail(), &field.right_tail()}) {
        double phi = 0.5 * std::arg(c->delta()), w = std::acos(std::min(1.0, std::abs(c->a())));
        for (double t : {phi + w, phi - w, phi + kPi + w, phi + kPi - w}) e.push_back(wrap_angle(t));
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end(), [](double a, double b) { return b - a < 1e-12; }), e.end());
    return e;
}

SpectralMeasure reconstruct_measure(const CoinField& field, int grid_size, const RadialOptions& opt) {
    SpectralMeasure m;
    // cos-mapped nodes on each arc between consecutive band edges; gap arcs carry no a.c. part
    std::vector<double> edges = band_edges(field);
    if (edges.empty()) edges.push_back(0.0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        double lo = edges[i], hi = i + 1 < edges.size() ? edges[i + 1] : edges[0] + kTwoPi;
        if (hi - lo < 1e-12) continue;
        if (in_spectral_gap(field, 0.5 * (lo + hi), 0.0)) continue;
        int n = std::max(16, static_cast<int>(std::lround(grid_size * (hi - lo) / kTwoPi)));
        m.segments.push_back({lo, hi});
        for (const auto& [t, w] : arc_nodes(lo, hi, n)) {
            RadialSample s = radial_density(field, t, opt);
            if (s.near_point_mass) continue;
            m.ac.push_back({t, hermitian_part(s.density), w});
        }
    }
    m.atoms = point_masses(field, eigenvalue_candidates(field, std::max(grid_size, 1024)), opt);
    return m;
}

// ---------------------------------------------------------------- constant coin

namespace {

void require_su2(const UnitaryCoin& c, const char* what) {
    if (!c.is_su2(1e-12))
        throw InvalidCoin(std::string(what) + " must have the SU(2) form [[alpha,beta],[-conj(beta),conj(alpha)]]");
}

std::array<Arc, 2> band_arcs(double rho) {
    double ta = std::acos(std::clamp(rho, 0.0, 1.0));
    return {Arc{ta, kPi - ta}, Arc{kPi + ta, kTwoPi - ta}};
}

} // namespace

Mat2 homogeneous_density(const UnitaryCoin& coin, double theta) {
    require_su2(coin, "coin");
    const cd al = coin.a(), be = coin.b();
    const double rho = std::abs(al);
    if (be == cd(0.0)) return Mat2::Identity();
    const double x = std::cos(theta), y = std::sin(theta);
    if (std::abs(x) >= rho || y == 0.0) return Mat2::Zero();
    const double sg = y > 0 ? 1.0 : -1.0;
    const double pre = 1.0 / std::sqrt(rho * rho - x * x);
    Mat2 d;
    d << std::abs(y), -I_unit * sg * (be / al) * x,
         I_unit * sg * (std::conj(be) / std::conj(al)) * x, std::abs(y);
    return pre * d;
}

SpectralMeasure homogeneous_measure(const UnitaryCoin& coin, int nodes_per_arc) {
    require_su2(coin, "coin");
    SpectralMeasure m;
    if (coin.b() == cd(0.0)) {
        // pure shift: Lebesgue measure times I
        int n = 2 * nodes_per_arc;
        m.segments.push_back({0.0, kTwoPi});
        for (int j = 0; j < n; ++j) m.ac.push_back({kTwoPi * j / n, Mat2::Identity(), 1.0 / n});
        return m;
    }
    for (const Arc& a : band_arcs(std::abs(coin.a()))) {
        m.segments.push_back(a);
        for (const auto& [t, w] : arc_nodes(a.lo, a.hi, nodes_per_arc))
            m.ac.push_back({t, homogeneous_density(coin, t), w});
    }
    return m;
}

// ---------------------------------------------------------------- two-phase model

TwoPhaseModel::TwoPhaseModel(const UnitaryCoin& c0, const UnitaryCoin& plus, const UnitaryCoin& minus) {
    if (!c0.is_su2(1e-12)) throw AssumptionViolation("C_0 is not of the SU(2) form [[alpha_0,beta_0],[-conj(beta_0),conj(alpha_0)]]");
    if (!plus.is_su2(1e-12)) throw AssumptionViolation("C_+ is not of the SU(2) form [[alpha_+,beta],[-conj(beta),conj(alpha_+)]]");
    if (!minus.is_su2(1e-12)) throw AssumptionViolation("C_- is not of the SU(2) form [[alpha_-,beta],[-conj(beta),conj(alpha_-)]]");
    if (std::abs(plus.b() - minus.b()) > 1e-12)
        throw AssumptionViolation("C_+ and C_- must share the off-diagonal entry beta");
    if (std::abs(std::abs(plus.a()) - std::abs(minus.a())) > 1e-12)
        throw AssumptionViolation("|alpha_+| = |alpha_-| is required");
    a0_ = c0.a();
    b0_ = c0.b();
    beta_ = plus.b();
    rho_ = std::abs(plus.a());
    if (!(rho_ > 0.0 && rho_ < 1.0)) throw AssumptionViolation("0 < |alpha_+-| < 1 is required");
    const cd sb = b0_ * std::conj(beta_);
    s_ = sb.real();
    t_ = sb.imag();
    if (!(std::abs(s_) < std::norm(beta_)))
        throw AssumptionViolation("|s| < |beta|^2 with s = Re(beta_0 conj(beta)) is required");
    x_star_ = (1.0 - s_) / std::sqrt(2.0 - 2.0 * s_ - rho_ * rho_);
    y_star_ = std::sqrt(1.0 - x_star_ * x_star_);
}

TwoPhaseModel TwoPhaseModel::from_field(const CoinField& field) {
    const auto& ov = field.overrides();
    for (const auto& [x, c] : ov) {
        (void)c;
        if (x != 0) throw AssumptionViolation("field is not two-phase: coin override away from the origin");
    }
    const UnitaryCoin& c0 = ov.count(0) ? ov.at(0) : field.right_tail();
    return TwoPhaseModel(c0, field.right_tail(), field.left_tail());
}

double TwoPhaseModel::mass_prefactor() const {
    const double u = 1.0 - s_;
    return x_star_ * std::sqrt(std::max(0.0, x_star_ * x_star_ - rho_ * rho_)) / (2.0 * y_star_ * u * u);
}

Mat2 TwoPhaseModel::density(double theta) const {
    const double x = std::cos(theta), y = std::sin(theta);
    // sgn(0) endpoints: the density's limit there is 0
    if (std::abs(x) >= rho_ || y == 0.0) return Mat2::Zero();
    const double sg = y > 0 ? 1.0 : -1.0, u = 1.0 - s_;
    const double pre = std::sqrt(rho_ * rho_ - x * x) / (u * u - (2.0 - 2.0 * s_ - rho_ * rho_) * x * x);
    Mat2 d;
    d << u * std::abs(y) + sg * t_ * x, -I_unit * sg * std::conj(a0_) * beta_ * x,
         I_unit * sg * a0_ * std::conj(beta_) * x, u * std::abs(y) - sg * t_ * x;
    return pre * d;
}

std::array<PointMass, 4> TwoPhaseModel::masses() const {
    const double p = mass_prefactor(), u = 1.0 - s_, xs = x_star_, ys = y_star_;
    Mat2 m1, m2;
    m1 << u * ys + t_ * xs, -I_unit * std::conj(a0_) * beta_ * xs,
          I_unit * a0_ * std::conj(beta_) * xs, u * ys - t_ * xs;
    m2 << u * ys - t_ * xs, I_unit * std::conj(a0_) * beta_ * xs,
          -I_unit * a0_ * std::conj(beta_) * xs, u * ys + t_ * xs;
    m1 *= p;
    m2 *= p;
    const double th = std::atan2(ys, xs);
    return {PointMass{th, m1}, PointMass{th + kPi, m1}, PointMass{kTwoPi - th, m2}, PointMass{kPi - th, m2}};
}

namespace {

// larger-modulus root of z² − 2Jz + ρ² and its λ-derivative
std::pair<cd, cd> z_minus_and_derivative(cd lambda, double rho) {
    const cd j = 0.5 * (lambda + 1.0 / lambda);
    const cd dj = 0.5 * (1.0 - 1.0 / (lambda * lambda));
    const cd root = std::sqrt(j * j - rho * rho);
    cd z = j + root;
    double sigma = 1.0;
    if (std::abs(j - root) > std::abs(z)) {
        z = j - root;
        sigma = -1.0;
    }
    return {z, dj * (1.0 + sigma * j / root)};
}

} // namespace

cd TwoPhaseModel::eigen_function(cd zeta) const {
    const cd j = 0.5 * (zeta + 1.0 / zeta);
    return 1.0 - s_ - j * z_minus_and_derivative(zeta, rho_).first;
}

Mat2 TwoPhaseModel::residue_mass(cd zeta) const {
    auto [z, dz] = z_minus_and_derivative(zeta, rho_);
    const cd c = 1.0 / (2.0 * zeta * z * dz);
    Mat2 m;
    m << b0_ * std::conj(beta_) - 1.0 + zeta * z, std::conj(a0_) * beta_,
         -a0_ * std::conj(beta_), std::conj(b0_) * beta_ - 1.0 + zeta * z;
    return c * m;
}

std::array<Arc, 2> TwoPhaseModel::support_arcs() const { return band_arcs(rho_); }

SpectralMeasure TwoPhaseModel::measure(int nodes_per_arc) const {
    SpectralMeasure m;
    for (const Arc& a : support_arcs()) {
        m.segments.push_back(a);
        for (const auto& [t, w] : arc_nodes(a.lo, a.hi, nodes_per_arc)) m.ac.push_back({t, density(t), w});
    }
    for (const auto& pm : masses())
        if (max_eigenvalue(pm.mass) > 0.0) m.atoms.push_back(pm);
    return m;
}

SpectralMeasure two_phase_measure(const UnitaryCoin& c0, const UnitaryCoin& plus, const UnitaryCoin& minus,
                                  int nodes_per_arc) {
    return TwoPhaseModel(c0, plus, minus).measure(nodes_per_arc);
}

std::optional<SpectralMeasure> closed_form_measure(const CoinField& field, int nodes_per_arc) {
    if (field.is_homogeneous()) {
        if (!field.right_tail().is_su2(1e-12)) return std::nullopt;
        return homogeneous_measure(field.right_tail(), nodes_per_arc);
    }
    try {
        return TwoPhaseModel::from_field(field).measure(nodes_per_arc);
    } catch (const AssumptionViolation&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------- moments and checks

MomentSequence moments(const SpectralMeasure& m, int n_max) {
    MomentSequence out;
    for (int n = -n_max; n <= n_max; ++n) out[n] = m.integrate([n](cd z) { return std::pow(z, n); });
    return out;
}

Mat2 exact_moment_oracle(const CoinField& field, int n) {
    Mat2 out;
    for (int c = 0; c < 2; ++c) {
        StateVector psi = StateVector::delta(0, c == 0 ? e_L() : e_R());
        for (int k = 0; k < std::abs(n); ++k) psi = n > 0 ? apply_walk(field, psi) : apply_adjoint(field, psi);
        out.col(c) = psi.at(0);
    }
    return out;
}

namespace {

// ∫ h(ζ) ⟨dΣ f̂(ζ), ĝ(ζ)⟩
cd spectral_pairing(const SpectralMeasure& m, const LaurentTransform& fh, const LaurentTransform& gh,
                    const std::function<cd(cd)>& h) {
    cd acc = 0.0, comp = 0.0;  // Kahan
    auto add = [&](cd v) {
        cd y = v - comp;
        cd t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    };
    for (const auto& s : m.ac) {
        cd z = std::polar(1.0, s.theta);
        add(s.weight * h(z) * form(s.density, fh(z), gh(z)));
    }
    for (const auto& a : m.atoms) {
        cd z = a.zeta();
        add(h(z) * form(a.mass, fh(z), gh(z)));
    }
    return acc;
}

} // namespace

double parseval_check(const CoinField& field, const SpectralMeasure& m, const StateVector& f, const StateVector& g) {
    cd lhs = f.inner(g);
    cd rhs = spectral_pairing(m, qw_fourier(field, f), qw_fourier(field, g), [](cd) { return cd(1.0); });
    return relative(std::abs(lhs - rhs), f.norm() * g.norm());
}

double inversion_check(const CoinField& field, const SpectralMeasure& m, const StateVector& f, Site x) {
    LaurentTransform fh = qw_fourier(field, f);
    Vec2 acc = Vec2::Zero();
    for (const auto& s : m.ac) {
        cd z = std::polar(1.0, s.theta);
        acc += s.weight * (cocycle_at(field, x, z) * (s.density * fh(z)));
    }
    for (const auto& a : m.atoms) {
        cd z = a.zeta();
        acc += cocycle_at(field, x, z) * (a.mass * fh(z));
    }
    return relative((f.at(x) - acc).norm(), f.norm());
}

double resolvent_representation_check(const CoinField& field, const SpectralMeasure& m, const StateVector& f,
                                      const StateVector& g, cd lambda) {
    GreenFunction green(field, lambda);
    cd lhs = green.inner(f, g);
    cd rhs = spectral_pairing(m, qw_fourier(field, f), qw_fourier(field, g),
                              [lambda](cd z) { return 1.0 / (z - lambda); });
    return relative(std::abs(lhs - rhs), f.norm() * g.norm());
}

SupportDescription spectrum_support(const SpectralMeasure& m, double threshold) {
    SupportDescription out;
    for (const Arc& seg : m.segments) {
        std::vector<std::pair<double, bool>> nodes;
        for (const auto& s : m.ac)
            if (s.theta >= seg.lo && s.theta <= seg.hi)
                nodes.emplace_back(s.theta, max_eigenvalue(s.density) > threshold);
        std::sort(nodes.begin(), nodes.end());
        std::size_t i = 0;
        while (i < nodes.size()) {
            if (!nodes[i].second) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < nodes.size() && nodes[j + 1].second) ++j;
            Arc a{i == 0 ? seg.lo : nodes[i].first, j + 1 == nodes.size() ? seg.hi : nodes[j].first};
            out.arcs.push_back(a);
            i = j + 1;
        }
    }
    // an arc through θ = 0 on a full-circle segment appears split in two
    if (out.arcs.size() >= 2 && out.arcs.front().lo <= 0.0 && out.arcs.back().hi >= kTwoPi) {
        Arc first = out.arcs.front();
        out.arcs.erase(out.arcs.begin());
        out.arcs.back().hi = kTwoPi + first.hi;
    }
    for (const auto& a : m.atoms) out.eigen_angles.push_back(a.theta);
    std::sort(out.eigen_angles.begin(), out.eigen_angles.end());
    return out;
}

Vec2 eigenprojection(const CoinField& field, const PointMass& atom, const StateVector& f, Site x) {
    cd z = atom.zeta();
    return cocycle_at(field, x, z) * (atom.mass * fourier_direct(field, f, z));
}

EigenfunctionDecay eigenfunction_decay(const CoinField& field, double theta, const Vec2& v, int sites) {
    // decaying directions just inside the circle; beyond the window the tail parts are exact
    // geometric sequences along the tail eigenvectors
    const cd lambda = (1.0 - 1e-14) * std::polar(1.0, theta);
    DecayingDirections d = decaying_directions(field, lambda, false);
    const Vec2 u = v.normalized();
    PropagatorCocycle F(field, lambda, false);

    EigenfunctionDecay out;
    out.norms.assign(static_cast<std::size_t>(2 * sites + 1), 0.0);
    const cd cp = inner(u, d.v_plus), cm = inner(u, d.v_minus);
    const Site np = field.n_plus(), nm = field.n_minus();
    const double zp = std::abs(d.right.z_plus), zm = 1.0 / std::abs(d.left.z_minus);
    const double base_p = (F(np) * d.v_plus).norm(), base_m = (F(-nm) * d.v_minus).norm();
    for (Site x = -sites; x <= sites; ++x) {
        double n;
        if (x >= 0)
            n = std::abs(cp) * (x <= np ? (F(x) * d.v_plus).norm() : base_p * std::pow(zp, double(x - np)));
        else
            n = std::abs(cm) * (x >= -nm ? (F(x) * d.v_minus).norm() : base_m * std::pow(zm, double(-x - nm)));
        out.norms[static_cast<std::size_t>(x + sites)] = n;
    }
    // the eigenfunction is F(x)u only if u is parallel to both decaying directions
    out.alignment = std::max(std::abs(det2(u, d.v_plus)), std::abs(det2(u, d.v_minus)));

    auto at = [&](Site x) { return out.norms[static_cast<std::size_t>(x + sites)]; };
    out.monotone_plus = out.monotone_minus = true;
    for (Site x = 1; x < sites; ++x) {
        if (!(at(x + 1) < at(x))) out.monotone_plus = false;
        if (!(at(-x - 1) < at(-x))) out.monotone_minus = false;
    }
    out.ratio_plus = at(sites) / at(1);
    out.ratio_minus = at(-sites) / at(-1);
    return out;
}

// ---------------------------------------------------------------- Cayley-transform quantities

cd herglotz_form(const CoinField& field, cd lambda, const StateVector& f) {
    GreenFunction green(field, lambda);
    double n = f.norm();
    return n * n + 2.0 * lambda * green.inner(f, f);
}

cd herglotz_from_measure(const CoinField& field, const SpectralMeasure& m, cd lambda, const StateVector& f) {
    LaurentTransform fh = qw_fourier(field, f);
    return spectral_pairing(m, fh, fh, [lambda](cd z) { return (z + lambda) / (z - lambda); });
}

cd h_form(const CoinField& field, cd lambda, const StateVector& f) {
    require_nonzero(lambda);
    PropagatorCocycle F(field, lambda, false), Fs(field, reflect(lambda), false);
    const SiteProjectors z0 = site_projectors(field.coin_at(0));
    cd half = 0.0;
    for (const auto& [x, fx] : f.entries()) {
        Mat2 fx_mat = F(x);
        for (const auto& [y, fy] : f.entries()) {
            Mat2 k;
            if (y < x)
                k = fx_mat * z0.zL * Fs(y).adjoint();
            else if (y > x)
                k = fx_mat * z0.zR * Fs(y).adjoint();
            else
                k = fx_mat * z0.zL * Fs(x).adjoint() - site_projectors(field.coin_at(x)).zL;
            half += form(k, fy, fx);
        }
    }
    double n = f.norm();
    return 2.0 * half + n * n;
}

} // namespace qwspec
