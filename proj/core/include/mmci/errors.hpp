#pragma once

#include <stdexcept>
#include <string>

namespace mmci {

// Shape or size mismatch between tensors / graph indices out of range.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad configuration value (negative weight, unknown ablation, ...).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be read, written, or parsed.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failure: non-finite values, diverged training, failed check.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mmci
