#include "qwspec/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qwspec::io {

json to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError("complex number must be a [re, im] pair, got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const Mat2& m) {
    return json::array({json::array({to_json(m(0, 0)), to_json(m(0, 1))}),
                        json::array({to_json(m(1, 0)), to_json(m(1, 1))})});
}

Mat2 matrix_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
        j[1].size() != 2)
        throw ConfigError("2x2 matrix must be [[z00, z01], [z10, z11]], got " + j.dump());
    Mat2 m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m(r, c) = complex_from_json(j[r][c]);
    return m;
}

namespace {

Mat2 coin_entries(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": coin must be an object with keys a, b, c, d");
    Mat2 m;
    const char* keys[4] = {"a", "b", "c", "d"};
    for (int k = 0; k < 4; ++k) {
        if (!j.contains(keys[k])) throw ConfigError(where + ": missing entry '" + keys[k] + "'");
        try {
            m(k / 2, k % 2) = complex_from_json(j.at(keys[k]));
        } catch (const ConfigError& e) {
            throw ConfigError(where + "." + keys[k] + ": " + e.what());
        }
    }
    return m;
}

json coin_object(const Mat2& m) {
    return json{{"a", to_json(m(0, 0))}, {"b", to_json(m(0, 1))}, {"c", to_json(m(1, 0))}, {"d", to_json(m(1, 1))}};
}

Site parse_site(const std::string& key) {
    char* end = nullptr;
    long long v = std::strtoll(key.c_str(), &end, 10);
    if (key.empty() || end == key.c_str() || *end != '\0') throw ConfigError("site key '" + key + "' is not an integer");
    return static_cast<Site>(v);
}

} // namespace

RawCoinField parse_coin_config(const json& j) {
    if (!j.is_object()) throw ConfigError("coin config must be a JSON object");
    for (const char* k : {"left_tail", "right_tail"})
        if (!j.contains(k)) throw ConfigError(std::string("coin config: missing '") + k + "'");
    RawCoinField raw;
    raw.left_tail = coin_entries(j.at("left_tail"), "left_tail");
    raw.right_tail = coin_entries(j.at("right_tail"), "right_tail");
    if (j.contains("overrides")) {
        const json& ov = j.at("overrides");
        if (!ov.is_object()) throw ConfigError("overrides must be an object keyed by site");
        for (const auto& [key, val] : ov.items()) raw.overrides[parse_site(key)] = coin_entries(val, "site " + key);
    }
    return raw;
}

RawCoinField read_coin_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_coin_config(j);
}

json coin_config_json(const RawCoinField& raw) {
    json ov = json::object();
    for (const auto& [x, m] : raw.overrides) ov[std::to_string(x)] = coin_object(m);
    return json{{"left_tail", coin_object(raw.left_tail)}, {"right_tail", coin_object(raw.right_tail)}, {"overrides", ov}};
}

json coin_config_json(const CoinField& field) {
    RawCoinField raw;
    raw.left_tail = field.left_tail().matrix();
    raw.right_tail = field.right_tail().matrix();
    for (const auto& [x, c] : field.overrides()) raw.overrides[x] = c.matrix();
    return coin_config_json(raw);
}

json state_json(const StateVector& f) {
    json e = json::object();
    for (const auto& [x, v] : f.entries()) e[std::to_string(x)] = json::array({to_json(v(0)), to_json(v(1))});
    return json{{"entries", e}};
}

StateVector parse_state(const json& j) {
    if (!j.is_object() || !j.contains("entries") || !j.at("entries").is_object())
        throw ConfigError("state must be {\"entries\": {site: [[re,im],[re,im]]}}");
    StateVector f;
    for (const auto& [key, val] : j.at("entries").items()) {
        if (!val.is_array() || val.size() != 2) throw ConfigError("state entry " + key + " must hold two components");
        f.set(parse_site(key), Vec2(complex_from_json(val[0]), complex_from_json(val[1])));
    }
    return f;
}

std::vector<MatrixRow> density_rows(const SpectralMeasure& m) {
    std::vector<MatrixRow> rows;
    rows.reserve(m.ac.size());
    for (const auto& s : m.ac) rows.push_back({s.theta, s.density});
    return rows;
}

std::vector<MatrixRow> mass_rows(const SpectralMeasure& m) {
    std::vector<MatrixRow> rows;
    for (const auto& a : m.atoms) rows.push_back({a.theta, a.mass});
    return rows;
}

std::vector<MatrixRow> moment_rows(const MomentSequence& m) {
    std::vector<MatrixRow> rows;
    for (const auto& [n, mat] : m) rows.push_back({static_cast<double>(n), mat});
    return rows;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string matrix_csv(const std::vector<MatrixRow>& rows, const std::string& key_name) {
    std::string out = key_name + ",re00,im00,re01,im01,re10,im10,re11,im11\n";
    for (const auto& r : rows) {
        out += format_double(r.key);
        for (int k = 0; k < 4; ++k) {
            cd z = r.m(k / 2, k % 2);
            out += ',' + format_double(z.real()) + ',' + format_double(z.imag());
        }
        out += '\n';
    }
    return out;
}

std::vector<MatrixRow> parse_matrix_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<MatrixRow> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> v;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            char* end = nullptr;
            double d = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw ConfigError("CSV cell '" + cell + "' is not a number");
            v.push_back(d);
        }
        if (v.size() != 9) throw ConfigError("CSV row must have 9 columns: " + line);
        MatrixRow r;
        r.key = v[0];
        for (int k = 0; k < 4; ++k) r.m(k / 2, k % 2) = cd(v[1 + 2 * k], v[2 + 2 * k]);
        rows.push_back(r);
    }
    return rows;
}

json matrix_json(const std::vector<MatrixRow>& rows, const std::string& key_name) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(json{{key_name, r.key}, {"matrix", to_json(r.m)}});
    return arr;
}

std::vector<MatrixRow> parse_matrix_json(const json& j, const std::string& key_name) {
    if (!j.is_array()) throw ConfigError("matrix table must be a JSON array");
    std::vector<MatrixRow> rows;
    for (const auto& e : j) rows.push_back({e.at(key_name).get<double>(), matrix_from_json(e.at("matrix"))});
    return rows;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

} // namespace qwspec::io
