#pragma once

#include <stdexcept>
#include <string>

namespace disc {

// Input problems: bad files, bad shapes, bad parameters. CLI maps these to exit 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical problems: solver failures, degenerate spectra. CLI maps these to exit 2.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace disc
