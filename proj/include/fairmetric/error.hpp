#pragma once

#include <stdexcept>
#include <string>

namespace fairmetric {

// Bad input: malformed distributions, mismatched dimensions, out-of-range
// parameters. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Filesystem failures (missing file, unwritable output). Exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fairmetric
