#pragma once

#include <stdexcept>
#include <string>

namespace ddsim {

// Bad arguments to a library call.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Unreadable or inconsistent configuration input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integration or fitting failed (trace drift, positivity, no convergence).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ddsim
