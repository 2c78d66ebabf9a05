#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hvs {

// Base of every error the library raises. The CLI maps the three families
// below onto exit codes 1 (input), 2 (numerical) and 3 (io).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number of the offending row.
class ParseError : public InputError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InvalidParamsError : public InputError {
public:
    using InputError::InputError;
};

/// Duplicate training inputs that disagree on the output.
class InconsistentDataError : public InputError {
public:
    using InputError::InputError;
};

class SolverFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularKernelError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Explicit integration produced a non-finite state or was run past its
/// stability limit.
class NumericalBlowup : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A surrogate table that did not reach its threshold was handed to a
/// consumer that requires a converged one.
class UnconvergedTableError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace hvs
