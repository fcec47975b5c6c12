#pragma once

#include <stdexcept>
#include <string>

namespace herdsim {

/// Bad configuration: unknown key, type mismatch, constraint violation.
/// CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unusable input data (CSV rows, non-positive prices, ...).
/// CLI maps this to exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator was asked to run on fewer samples than it needs.
/// CLI maps this to exit code 4.
struct InsufficientSamplesError : std::runtime_error {
    explicit InsufficientSamplesError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace herdsim
