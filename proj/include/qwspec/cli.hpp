// cli.hpp — batch front-end: run configuration, subcommand dispatch, JSON reports

#pragma once

#include "qwspec/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qwspec::cli {

enum ExitCode : int { kOk = 0, kToleranceFailure = 1, kConfigError = 2 };

struct RunConfig {
    std::string command;                  // identities | green | x0 | measure | moments | verify
    std::string coin_path;
    std::optional<cd> lambda;             // single spectral parameter
    std::string lambda_grid = "0.3,3,16"; // "r_min,r_max,count"
    int grid = 1024;                      // θ-grid size (power of two >= 16)
    double eps_min = 0x1p-18;             // smallest radial offset 1 − r
    std::optional<double> tol;            // per-command default when unset
    std::string out;                      // artifact path (none when empty)
    std::string format = "csv";           // csv | json
    std::uint64_t seed = 20240611;
    int n = 20;                           // moment order
    int window = 4;                       // sites [−window, window]
    bool closed_form = false;             // measure: use the closed form when applicable
    bool numeric = false;                 // moments: force the radial-limit reconstruction
    std::vector<int> only;                // verify: criterion subset
};

struct RunResult {
    int exit_code = kOk;
    io::json report;
};

// "re,im" or "re"
cd parse_lambda(const std::string& text);
// "r_min,r_max,count": geometric radii, golden-angle phases; points within 1e-6 of the unit circle are dropped
std::vector<cd> lambda_grid(const std::string& spec);
// throws ConfigError on an invalid configuration
void validate(const RunConfig& cfg);
double default_tolerance(const RunConfig& cfg);

// never throws: configuration problems become exit code 2 with a report
RunResult run(const RunConfig& cfg);

// parses argv, runs, prints the JSON report to `out`; returns the exit code
int main(int argc, const char* const* argv, std::ostream& out);

} // namespace qwspec::cli
