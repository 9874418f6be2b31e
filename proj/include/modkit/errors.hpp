#pragma once

#include <stdexcept>
#include <string>

namespace modkit {

// Invalid parameter values (distribution parameters, config fields, CLI-derived
// options). Maps to exit code 3 when the value came from an input file.
struct ParamError : std::invalid_argument {
    explicit ParamError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed or insufficient input data (files, series, event logs).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure: non-convergence, degenerate fits, singular systems.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace modkit
