#pragma once

#include <stdexcept>
#include <string>

namespace amprb {

/// Base class for failures of a numerical procedure (as opposed to bad input).
/// The CLI maps these to exit status 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "numerical"; }
};

/// Argument outside the domain of a special function (e.g. k1 at the origin).
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "domain"; }
};

/// A boundary-value problem hit a Dirichlet eigenvalue.
class ResonanceError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "resonance"; }
};

/// Singular linear system or evaluation at a singular point.
class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "singularity"; }
};

/// Iterative procedure failed to converge or ran out of budget.
class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "convergence"; }
};

}  // namespace amprb
