#pragma once

#include <stdexcept>
#include <string>

namespace prodrisk {

/// Malformed input document: missing key, wrong type, unparsable value.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a model constraint (CFL, routing sums, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failures when reading or writing artifacts.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace prodrisk
