#pragma once

#include <stdexcept>
#include <string>

namespace plasmon {

/// Invalid run configuration or invalid construction arguments.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base of the failures reported with the numerical exit status.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A function was evaluated outside of its domain of definition.
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The Hamiltonian is constant on a mesh, so it cannot be stratified.
class DegenerateFieldError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A time step could not be completed (non-convergence, NaN, lost positivity).
class StepFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// File input/output failure; the message carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace plasmon
