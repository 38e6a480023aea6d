#pragma once

#include <stdexcept>
#include <string>

namespace eivuq {

// Raised when a computation fails numerically (NaN loss, support overflow).
// The CLI maps this family to its own exit code, distinct from bad input data.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised for malformed or inconsistent data (dimension mismatches, missing
// table entries, unreadable files).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace eivuq
