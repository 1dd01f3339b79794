#pragma once

#include <stdexcept>
#include <string>

namespace awfisher {

/// Input outside the mathematical domain of an operation (bad p-value,
/// out-of-range K, odd sample size, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent data files (CSV, null tables).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric routine could not produce a result (e.g. too few usable
/// points for a fit).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace awfisher
