#pragma once

#include <stdexcept>
#include <string>

namespace bagus {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Errors caused by caller input: bad shapes, out-of-range indices, unparsable
/// files, parameters outside their domain. The CLI maps these to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

class InvalidDataError : public UsageError {
public:
    using UsageError::UsageError;
};

class IndexError : public UsageError {
public:
    using UsageError::UsageError;
};

class ShapeError : public UsageError {
public:
    using UsageError::UsageError;
};

class ParameterError : public UsageError {
public:
    using UsageError::UsageError;
};

class ParseError : public UsageError {
public:
    using UsageError::UsageError;
};

/// A function was called outside its mathematical domain (e.g. the penalty
/// gradient at exactly zero, where only a subgradient interval exists).
class ContractViolation : public UsageError {
public:
    using UsageError::UsageError;
};

/// Errors raised by the numerics. The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefiniteError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InternalConsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GenerationFailedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class TuningFailedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace bagus
