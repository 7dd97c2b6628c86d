#include "qwspec/cli.hpp"
#include "qwspec/acceptance.hpp"
#include "qwspec/errors.hpp"
#include "qwspec/linalg.hpp"
#include "qwspec/resolvent.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace qwspec::cli {

using io::json;

namespace {

const std::vector<std::string> kCommands = {"identities", "green", "x0", "measure", "moments", "verify"};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": cannot parse '" + s + "' as a number");
    }
}

bool power_of_two_at_least_16(int n) { return n >= 16 && (n & (n - 1)) == 0; }

// plain numeric table; complex matrices are spread over re/im columns
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string csv() const {
        std::string s;
        for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
        s += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) s += (c ? "," : "") + io::format_double(row[c]);
            s += '\n';
        }
        return s;
    }
    json to_json() const { return json{{"columns", columns}, {"rows", rows}}; }
};

void add_matrix_columns(std::vector<std::string>& cols, const std::string& prefix) {
    for (const char* e : {"00", "01", "10", "11"}) {
        cols.push_back(prefix + "re" + e);
        cols.push_back(prefix + "im" + e);
    }
}

void push_matrix(std::vector<double>& row, const Mat2& m) {
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            row.push_back(m(r, c).real());
            row.push_back(m(r, c).imag());
        }
}

Table matrix_table(const std::vector<io::MatrixRow>& rows, const std::string& key) {
    Table t{{key}, {}};
    add_matrix_columns(t.columns, "");
    for (const auto& r : rows) {
        std::vector<double> row{r.key};
        push_matrix(row, r.m);
        t.rows.push_back(std::move(row));
    }
    return t;
}

// named artifacts of one run; the first is the primary table
using Artifacts = std::vector<std::pair<std::string, Table>>;

std::string with_suffix(const std::string& path, const std::string& name) {
    const std::string ext = ".csv";
    std::string stem = path;
    if (stem.size() > ext.size() && stem.compare(stem.size() - ext.size(), ext.size(), ext) == 0)
        stem.resize(stem.size() - ext.size());
    return stem + "." + name + ext;
}

void emit(const RunConfig& cfg, const Artifacts& arts, json& report) {
    if (arts.empty()) return;
    if (cfg.format == "json") {
        json data = json::object();
        for (const auto& [name, t] : arts) data[name] = t.to_json();
        if (cfg.out.empty()) {
            report["data"] = data;
        } else {
            io::write_file(cfg.out, data.dump(2) + "\n");
            report["artifacts"] = json::array({cfg.out});
        }
        return;
    }
    if (cfg.out.empty()) {
        report["artifacts"] = json::array();
        return;
    }
    json files = json::array();
    for (std::size_t k = 0; k < arts.size(); ++k) {
        std::string path = k == 0 ? cfg.out : with_suffix(cfg.out, arts[k].first);
        io::write_file(path, arts[k].second.csv());
        files.push_back(path);
    }
    report["artifacts"] = files;
}

CoinField load_field(const RunConfig& cfg) { return CoinField::from_raw(io::read_coin_config(cfg.coin_path)); }

std::vector<cd> lambdas_of(const RunConfig& cfg) {
    return cfg.lambda ? std::vector<cd>{*cfg.lambda} : lambda_grid(cfg.lambda_grid);
}

RadialOptions radial_options(const RunConfig& cfg) {
    RadialOptions opt;
    opt.k_max = static_cast<int>(std::lround(-std::log2(cfg.eps_min)));
    return opt;
}

double relative_gap(const Mat2& a, const Mat2& b) { return maxabs(a - b) / std::max(1.0, maxabs(b)); }

// ---- subcommands: fill the report, return whether every tolerance was met

bool run_identities(const RunConfig& cfg, double tol, json& report, Artifacts& arts) {
    CoinField field = load_field(cfg);
    Table t{{"lambda_re", "lambda_im", "x"}, {}};
    for (int k = 1; k <= 10; ++k) t.columns.push_back("r" + std::to_string(k));
    t.columns.push_back("det_T");
    t.columns.push_back("det_S");
    std::array<double, 10> worst{};
    double worst_det = 0.0, worst_all = 0.0;
    for (cd lam : lambdas_of(cfg)) {
        for (Site x = -cfg.window; x <= cfg.window; ++x) {
            IdentityResiduals r = identity_suite(field, x, lam);
            std::vector<double> row{lam.real(), lam.imag(), static_cast<double>(x)};
            for (std::size_t i = 0; i < r.r.size(); ++i) {
                row.push_back(r.r[i]);
                worst[i] = std::max(worst[i], r.r[i]);
            }
            row.push_back(r.det_T);
            row.push_back(r.det_S);
            worst_det = std::max({worst_det, std::abs(r.det_T), std::abs(r.det_S)});
            worst_all = std::max(worst_all, r.max());
            t.rows.push_back(std::move(row));
        }
    }
    json per = json::object();
    for (std::size_t i = 0; i < worst.size(); ++i) per[IdentityResiduals::names()[i]] = worst[i];
    per["determinants"] = worst_det;
    report["worst_residuals"] = per;
    report["max_residual"] = worst_all;
    report["evaluations"] = t.rows.size();
    arts.push_back({"identities", std::move(t)});
    return worst_all <= tol;
}

bool run_green(const RunConfig& cfg, double tol, json& report, Artifacts& arts) {
    CoinField field = load_field(cfg);
    const cd lam = *cfg.lambda;
    GreenFunction G(field, lam);
    Table t{{"x", "y"}, {}};
    add_matrix_columns(t.columns, "");
    t.columns.insert(t.columns.end(), {"rank_defect", "diagonal_mismatch", "oracle_discrepancy"});
    double rank = 0.0, diag = 0.0, oracle = 0.0;
    bool oracle_ok = true;
    for (Site x = -cfg.window; x <= cfg.window; ++x) {
        for (Site y = -cfg.window; y <= cfg.window; ++y) {
            GreenKernelEntry e = G.entry(x, y);
            double gap = std::numeric_limits<double>::quiet_NaN();
            try {
                gap = relative_gap(e.matrix, neumann_green(field, lam, x, y));
                oracle = std::max(oracle, gap);
            } catch (const SlowConvergence&) {
                oracle_ok = false;
            }
            std::vector<double> row{static_cast<double>(x), static_cast<double>(y)};
            push_matrix(row, e.matrix);
            row.insert(row.end(), {e.rank_defect, e.diagonal_mismatch, gap});
            rank = std::max(rank, e.rank_defect);
            diag = std::max(diag, e.diagonal_mismatch);
            t.rows.push_back(std::move(row));
        }
    }
    report["lambda"] = io::to_json(lam);
    report["max_rank_defect"] = rank;
    report["max_diagonal_mismatch"] = diag;
    report["max_oracle_discrepancy"] = oracle;
    report["oracle_converged"] = oracle_ok;
    arts.push_back({"green", std::move(t)});
    return rank <= tol && diag <= tol && oracle <= tol && oracle_ok;
}

bool run_x0(const RunConfig& cfg, double tol, json& report, Artifacts& arts) {
    CoinField field = load_field(cfg);
    Table t{{"lambda_re", "lambda_im"}, {}};
    add_matrix_columns(t.columns, "x0_");
    add_matrix_columns(t.columns, "oracle_");
    add_matrix_columns(t.columns, "x_");
    t.columns.push_back("discrepancy");
    double worst = 0.0;
    json failures = json::array();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (cd lam : lambdas_of(cfg)) {
        std::vector<double> row{lam.real(), lam.imag()};
        try {
            ResolventData d = x0_via_directions(field, lam);
            Mat2 oracle = neumann_x0(field, lam);
            double gap = relative_gap(d.x0, oracle);
            worst = std::max(worst, gap);
            push_matrix(row, d.x0);
            push_matrix(row, oracle);
            push_matrix(row, d.x_carath);
            row.push_back(gap);
        } catch (const std::runtime_error& e) {
            row.resize(row.size() + 24, nan);
            row.push_back(nan);
            failures.push_back(json{{"lambda", io::to_json(lam)}, {"error", e.what()}});
        }
        t.rows.push_back(std::move(row));
    }
    report["points"] = t.rows.size();
    report["max_discrepancy"] = worst;
    report["failures"] = failures;
    arts.push_back({"x0", std::move(t)});
    return worst <= tol && failures.empty();
}

// closed-form density on the uniform grid, point masses, and the quadrature measure
struct ClosedForm {
    std::function<Mat2(double)> density;
    std::vector<PointMass> atoms;
    SpectralMeasure measure;
    std::string model;
};

std::optional<ClosedForm> closed_form(const CoinField& field) {
    std::optional<SpectralMeasure> m = closed_form_measure(field);
    if (!m) return std::nullopt;
    if (field.is_homogeneous()) {
        UnitaryCoin c = field.right_tail();
        return ClosedForm{[c](double th) { return homogeneous_density(c, th); }, {}, std::move(*m), "homogeneous"};
    }
    TwoPhaseModel tp = TwoPhaseModel::from_field(field);
    auto a = tp.masses();
    return ClosedForm{[tp](double th) { return tp.density(th); }, {a.begin(), a.end()}, std::move(*m), "two-phase"};
}

bool run_measure(const RunConfig& cfg, double tol, json& report, Artifacts& arts) {
    CoinField field = load_field(cfg);
    const int N = cfg.grid;
    std::vector<io::MatrixRow> density;
    SpectralMeasure atoms_only, total;
    std::optional<ClosedForm> cf;
    if (cfg.closed_form) {
        cf = closed_form(field);
        if (!cf) report["note"] = "no closed form applies to this field; using the radial-limit reconstruction";
    }
    double min_eig = 0.0;
    if (cf) {
        for (int j = 0; j < N; ++j) {
            double th = 2.0 * std::numbers::pi * j / N;
            density.push_back({th, cf->density(th)});
        }
        atoms_only.atoms = cf->atoms;
        total = std::move(cf->measure);
        report["method"] = "closed-form (" + cf->model + ")";
        min_eig = total.min_eigenvalue();
    } else {
        RadialOptions opt = radial_options(cfg);
        int unconverged = 0, flagged = 0;
        for (const RadialSample& s : ac_density(field, N, opt)) {
            density.push_back({s.theta, s.density});
            unconverged += !s.converged;
            flagged += s.near_point_mass;
        }
        atoms_only.atoms = point_masses(field, eigenvalue_candidates(field), opt);
        total = reconstruct_measure(field, N, opt);
        report["method"] = "radial-limit";
        report["eps_min"] = cfg.eps_min;
        report["unconverged_samples"] = unconverged;
        report["near_point_mass_samples"] = flagged;
        min_eig = total.min_eigenvalue();
    }
    for (const auto& r : density) min_eig = std::min(min_eig, min_eigenvalue(r.m));
    double mass_error = maxabs(total.total_mass() - Mat2::Identity());
    json masses = json::array();
    for (const PointMass& a : atoms_only.atoms)
        masses.push_back(json{{"theta", a.theta}, {"matrix", io::to_json(a.mass)}});
    report["grid"] = N;
    report["point_masses"] = masses;
    report["total_mass_error"] = mass_error;
    report["min_eigenvalue"] = min_eig;
    arts.push_back({"density", matrix_table(density, "theta")});
    arts.push_back({"masses", matrix_table(io::mass_rows(atoms_only), "theta")});
    return mass_error <= tol && min_eig >= -tol;
}

bool run_moments(const RunConfig& cfg, double tol, json& report, Artifacts& arts) {
    CoinField field = load_field(cfg);
    std::optional<ClosedForm> cf;
    if (!cfg.numeric) cf = closed_form(field);
    SpectralMeasure m = cf ? std::move(cf->measure) : reconstruct_measure(field, cfg.grid, radial_options(cfg));
    report["method"] = cf ? "closed-form (" + cf->model + ")" : std::string("radial-limit");
    MomentSequence mom = moments(m, cfg.n);
    Table t{{"n"}, {}};
    add_matrix_columns(t.columns, "measure_");
    add_matrix_columns(t.columns, "oracle_");
    t.columns.push_back("discrepancy");
    double worst = 0.0;
    for (const auto& [n, mn] : mom) {
        Mat2 oracle = exact_moment_oracle(field, n);
        double gap = maxabs(mn - oracle);
        worst = std::max(worst, gap);
        std::vector<double> row{static_cast<double>(n)};
        push_matrix(row, mn);
        push_matrix(row, oracle);
        row.push_back(gap);
        t.rows.push_back(std::move(row));
    }
    report["n"] = cfg.n;
    report["max_discrepancy"] = worst;
    arts.push_back({"moments", std::move(t)});
    return worst <= tol;
}

bool run_verify(const RunConfig& cfg, json& report) {
    AcceptanceOptions opt;
    opt.seed = cfg.seed;
    auto results = run_acceptance(opt, cfg.only, [](const CriterionResult& r) {
        std::cerr << format_result_line(r) << std::endl;
    });
    report["acceptance"] = acceptance_json(results, opt);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.pass();
    return ok;
}

json base_report(const RunConfig& cfg) {
    json r{{"command", cfg.command}, {"seed", cfg.seed}};
    if (!cfg.coin_path.empty()) r["coin"] = cfg.coin_path;
    return r;
}

} // namespace

cd parse_lambda(const std::string& text) {
    auto parts = split(text, ',');
    if (parts.empty() || parts.size() > 2) throw ConfigError("lambda must be 're,im' or 're', got '" + text + "'");
    double re = parse_number(parts[0], "lambda");
    double im = parts.size() == 2 ? parse_number(parts[1], "lambda") : 0.0;
    return {re, im};
}

std::vector<cd> lambda_grid(const std::string& spec) {
    auto parts = split(spec, ',');
    if (parts.size() != 3) throw ConfigError("lambda grid must be 'r_min,r_max,count', got '" + spec + "'");
    const double lo = parse_number(parts[0], "lambda grid"), hi = parse_number(parts[1], "lambda grid");
    const double cnt = parse_number(parts[2], "lambda grid");
    if (!(lo > 0.0) || hi < lo) throw ConfigError("lambda grid needs 0 < r_min <= r_max");
    if (cnt < 1 || cnt > 1e6 || cnt != std::floor(cnt)) throw ConfigError("lambda grid count must be a positive integer");
    const int count = static_cast<int>(cnt);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    std::vector<cd> out;
    for (int k = 0; k < count; ++k) {
        double r = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
        if (std::abs(r - 1.0) < 1e-6) continue;
        double phase = 2.0 * std::numbers::pi * std::fmod(0.25 + k * golden, 1.0);
        out.push_back(std::polar(r, phase));
    }
    if (out.empty()) throw ConfigError("lambda grid has no points off the unit circle");
    return out;
}

void validate(const RunConfig& cfg) {
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
        throw ConfigError("unknown command '" + cfg.command + "'");
    if (!power_of_two_at_least_16(cfg.grid)) throw ConfigError("grid must be a power of two >= 16");
    if (cfg.tol && !(*cfg.tol > 0.0)) throw ConfigError("tolerance must be positive");
    if (!(cfg.eps_min > 0.0) || cfg.eps_min > 0x1p-7 || cfg.eps_min < 0x1p-40)
        throw ConfigError("eps-min must lie in [2^-40, 2^-7]");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
    if (cfg.n < 0 || cfg.n > 100000) throw ConfigError("n must lie in [0, 100000]");
    if (cfg.window < 0 || cfg.window > 10000) throw ConfigError("window must lie in [0, 10000]");
    for (int id : cfg.only)
        if (id < 1 || id > 10) throw ConfigError("criterion ids are 1..10");
    if (cfg.command != "verify" && cfg.coin_path.empty()) throw ConfigError("--coin is required");
    if (cfg.lambda && *cfg.lambda == cd(0.0)) throw ConfigError("lambda must be nonzero");
    if (cfg.command == "green" && !cfg.lambda) throw ConfigError("green needs --lambda");
    if ((cfg.command == "green" || cfg.command == "x0") && cfg.lambda && std::abs(std::abs(*cfg.lambda) - 1.0) < 1e-6)
        throw ConfigError("lambda must lie off the unit circle");
    if (!cfg.lambda) lambda_grid(cfg.lambda_grid);
}

double default_tolerance(const RunConfig& cfg) {
    if (cfg.tol) return *cfg.tol;
    if (cfg.command == "identities") return 1e-12;
    if (cfg.command == "green" || cfg.command == "x0") return 1e-9;
    if (cfg.command == "measure") return cfg.closed_form ? 1e-6 : 1e-3;
    if (cfg.command == "moments") return 1e-5;
    return 0.0;
}

RunResult run(const RunConfig& cfg) {
    RunResult res;
    res.report = base_report(cfg);
    json& report = res.report;
    try {
        validate(cfg);
        const double tol = default_tolerance(cfg);
        if (cfg.command != "verify") report["tolerance"] = tol;
        Artifacts arts;
        bool ok = false;
        if (cfg.command == "identities") ok = run_identities(cfg, tol, report, arts);
        else if (cfg.command == "green") ok = run_green(cfg, tol, report, arts);
        else if (cfg.command == "x0") ok = run_x0(cfg, tol, report, arts);
        else if (cfg.command == "measure") ok = run_measure(cfg, tol, report, arts);
        else if (cfg.command == "moments") ok = run_moments(cfg, tol, report, arts);
        else ok = run_verify(cfg, report);
        emit(cfg, arts, report);
        report["status"] = ok ? "pass" : "fail";
        res.exit_code = ok ? kOk : kToleranceFailure;
    } catch (const ConfigError& e) {
        report["status"] = "config_error";
        report["message"] = e.what();
        res.exit_code = kConfigError;
    } catch (const std::invalid_argument& e) {
        // invalid coins, λ on the unit circle, violated model assumptions
        report["status"] = "config_error";
        report["message"] = e.what();
        res.exit_code = kConfigError;
    } catch (const std::exception& e) {
        report["status"] = "fail";
        report["message"] = e.what();
        res.exit_code = kToleranceFailure;
    }
    return res;
}

int main(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Spectral data of one-dimensional two-state quantum walks"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    std::string lambda;
    app.add_option("--coin", cfg.coin_path, "coin-config JSON");
    app.add_option("--lambda", lambda, "spectral parameter re,im");
    app.add_option("--lambda-grid", cfg.lambda_grid, "r_min,r_max,count (used when --lambda is absent)");
    app.add_option("--grid", cfg.grid, "theta-grid size, power of two >= 16");
    app.add_option("--eps-min", cfg.eps_min, "smallest radial offset 1 - r");
    app.add_option_function<double>("--tol", [&](double v) { cfg.tol = v; }, "tolerance (per-command default)");
    app.add_option("--out", cfg.out, "artifact path");
    app.add_option("--format", cfg.format, "csv or json");
    app.add_option("--seed", cfg.seed, "seed of randomized checks");
    app.add_option("--n", cfg.n, "largest moment order");
    app.add_option("--window", cfg.window, "sites [-window, window]");
    app.add_option("--only", cfg.only, "criterion ids (verify)")->delimiter(',');
    app.add_flag("--closed-form", cfg.closed_form, "use the closed form when one applies (measure)");
    app.add_flag("--numeric", cfg.numeric, "force the radial-limit reconstruction (moments)");
    app.add_subcommand("identities", "cocycle identity residuals over a lambda grid and site window");
    app.add_subcommand("green", "Green-kernel table at one lambda, with Neumann-series oracle");
    app.add_subcommand("x0", "x0 and x(lambda) over a lambda grid: direction method vs Neumann series");
    app.add_subcommand("measure", "density and point masses of the spectral measure");
    app.add_subcommand("moments", "moments of the measure vs exact walk evolution");
    app.add_subcommand("verify", "full acceptance suite");
    try {
        app.parse(argc, argv);
        cfg.command = app.get_subcommands().front()->get_name();
        if (!lambda.empty()) cfg.lambda = parse_lambda(lambda);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, out);
    } catch (const CLI::ParseError& e) {
        json r{{"command", cfg.command}, {"seed", cfg.seed}, {"status", "config_error"}, {"message", e.what()}};
        out << r.dump(2) << std::endl;
        return kConfigError;
    } catch (const ConfigError& e) {
        json r{{"command", cfg.command}, {"seed", cfg.seed}, {"status", "config_error"}, {"message", e.what()}};
        out << r.dump(2) << std::endl;
        return kConfigError;
    }
    RunResult res = run(cfg);
    out << res.report.dump(2) << std::endl;
    return res.exit_code;
}

} // namespace qwspec::cli
