#pragma once

#include <stdexcept>
#include <string>

namespace specbound {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: bad matrix entries, bad file contents, bad flags.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Mathematically out-of-domain argument (e.g. mu <= 0, non-positive vector).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Structural precondition violated (reducible matrix, disconnected graph).
class StructureError : public Error {
public:
    using Error::Error;
};

/// Iteration failed to converge or a computation lost accuracy.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what, double last_residual = -1.0)
        : Error(what), last_residual(last_residual) {}
    double last_residual;
};

/// Problem size exceeds an exhaustive-enumeration guard.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace specbound
