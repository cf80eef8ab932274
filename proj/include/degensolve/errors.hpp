#pragma once

#include <stdexcept>
#include <string>

namespace degensolve {

/// Bad argument or configuration value supplied by the caller.
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent or malformed data encountered during a computation.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// An iteration failed to converge or hit a singular point.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file problems (unknown key, type mismatch, unresolved name).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Output emission failed (IO); partial outputs are removed by the emitter.
struct EmissionError : std::runtime_error {
    explicit EmissionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace degensolve
