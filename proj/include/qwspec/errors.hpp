// errors.hpp — typed failures

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qwspec {

struct InvalidCoin : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroSpectralParameter : std::invalid_argument {
    ZeroSpectralParameter() : std::invalid_argument("spectral parameter must be nonzero") {}
};

struct UnitModulusLambda : std::invalid_argument {
    UnitModulusLambda() : std::invalid_argument("|lambda| = 1 is not allowed here") {}
};

// double eigenvalue of a tail transfer matrix
struct DegenerateSpectralParameter : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// v+ and v- (numerically) parallel
struct DependentDirections : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SlowConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a closed-form model's hypotheses fail; message names the clause
struct AssumptionViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_nonzero(std::complex<double> lambda) {
    if (lambda == std::complex<double>(0.0, 0.0)) throw ZeroSpectralParameter();
}

} // namespace qwspec
