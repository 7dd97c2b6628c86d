// io.hpp — coin-config and state JSON, CSV/JSON tables of 2x2 complex matrices

#pragma once

#include "qwspec/spectral.hpp"

#include <json.hpp>

#include <string>

namespace qwspec::io {

using json = nlohmann::json;

// complex numbers are [re, im] pairs
json to_json(cd z);
cd complex_from_json(const json& j);
// [[z00, z01], [z10, z11]]
json to_json(const Mat2& m);
Mat2 matrix_from_json(const json& j);

// { "left_tail": {"a":[re,im],"b":..,"c":..,"d":..}, "right_tail": {...}, "overrides": {"0": {...}} }
// Throws ConfigError on malformed input (validation of unitarity is left to CoinField::from_raw).
RawCoinField parse_coin_config(const json& j);
RawCoinField read_coin_config(const std::string& path);
json coin_config_json(const RawCoinField& raw);
json coin_config_json(const CoinField& field);

// { "entries": {"-2": [[re,im],[re,im]], ...} }
json state_json(const StateVector& f);
StateVector parse_state(const json& j);

// one row of a matrix table: key (θ or n) plus the 8 real columns re/im of m00, m01, m10, m11
struct MatrixRow {
    double key = 0.0;
    Mat2 m = Mat2::Zero();
};

std::vector<MatrixRow> density_rows(const SpectralMeasure& m);
std::vector<MatrixRow> mass_rows(const SpectralMeasure& m);
std::vector<MatrixRow> moment_rows(const MomentSequence& m);

// 17 significant digits; header "<key>,re00,im00,re01,im01,re10,im10,re11,im11"
std::string matrix_csv(const std::vector<MatrixRow>& rows, const std::string& key_name);
std::vector<MatrixRow> parse_matrix_csv(const std::string& text);
// [{ "<key>": v, "matrix": [[..],[..]] }, ...]
json matrix_json(const std::vector<MatrixRow>& rows, const std::string& key_name);
std::vector<MatrixRow> parse_matrix_json(const json& j, const std::string& key_name);

// shortest decimal string that re-parses to the same double (printf %.17g)
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace qwspec::io
