#pragma once

#include <stdexcept>
#include <string>

namespace qtt {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments: out-of-range parameters, shape mismatches, malformed trees.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A precondition of an operation was violated by the caller.
class ContractViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Dense materialization would exceed the configured entry cap.
class SizeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Malformed QTT container.
class FormatError : public Error {
public:
    using Error::Error;
};

// SVD failure, non-finite values and similar.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {
inline void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ValidationError(what);
}
} // namespace detail

} // namespace qtt
