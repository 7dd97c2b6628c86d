// acceptance.hpp — the ten acceptance criteria as a runnable suite

#pragma once

#include "qwspec/io.hpp"

#include <cstdint>
#include <functional>

namespace qwspec {

// one measured quantity with its bound; `at_least` flips the comparison
struct SubCheck {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool at_least = false;
    bool ok() const { return at_least ? value > bound : value < bound; }
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<SubCheck> checks;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0: none
    std::string error;        // set when the criterion threw
    bool pass() const;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    int nodes_per_arc = 50000;  // 10⁵ quadrature points over the two support arcs
    int radial_grid = 8192;
};

// runs every criterion (or only those listed in `only`), reporting each as it finishes
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, const std::vector<int>& only = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result_line(const CriterionResult& r);
io::json acceptance_json(const std::vector<CriterionResult>& results, const AcceptanceOptions& opt);

} // namespace qwspec
