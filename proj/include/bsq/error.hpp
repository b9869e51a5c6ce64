#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bsq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid grid or run configuration (including config-file parse failures).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A model or operator parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Parameters are valid numbers but select a regime the solver does not
/// support (negative b or d makes the implicit operators non-invertible).
class UnsupportedRegimeError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Non-finite values encountered in a field or intermediate term.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Time stepping produced a non-finite or unphysical state.
class BlowUpError : public NumericError {
public:
    BlowUpError(const std::string& what, std::size_t step)
        : NumericError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Caller misuse: mismatched grids, too few samples, unknown names.
class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bsq
