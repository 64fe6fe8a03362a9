#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace startrace {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operands live on different phase spaces or carry incompatible coefficient data.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Leading coefficient of a series (or an IntegralValue) has no inverse.
struct NonInvertible : Error {
    using Error::Error;
};

/// A Gaussian-class term with no decay (t = 0) was handed to an integrator.
struct NotIntegrable : Error {
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
struct PreconditionViolation : Error {
    using Error::Error;
};

/// Grid data is not zero on its declared boundary margin.
struct MarginViolation : Error {
    using Error::Error;
};

/// Two trace functionals are not proportional on a probe battery.
struct InconsistentRatio : Error {
    using Error::Error;
};

/// Malformed or inconsistent input file.
struct InputError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position(position) {}
    std::size_t position;
};

}  // namespace startrace
