#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace optokerr {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid, non-finite or out-of-range input.
class DomainError : public Error {
public:
    using Error::Error;
};

// A numerical routine failed to deliver a trustworthy answer.
class SolverError : public Error {
public:
    using Error::Error;
};

// Companion-matrix eigen-decomposition failed; keeps the polynomial for diagnosis.
class RootFindingError : public SolverError {
public:
    RootFindingError(const std::string& what, std::vector<double> coefficients)
        : SolverError(what), coefficients_(std::move(coefficients)) {}
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }

private:
    std::vector<double> coefficients_;
};

// A candidate photon number does not satisfy the steady-state equation.
class RejectedRootError : public Error {
public:
    using Error::Error;
};

// Characteristic coefficients carry an imaginary part: the matrix is not physical.
class StructuralError : public Error {
public:
    using Error::Error;
};

// The sideband system has a vanishing pivot.
class SingularSystemError : public SolverError {
public:
    SingularSystemError(const std::string& what, std::size_t pivot)
        : SolverError(what), pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

// Adaptive step size collapsed below the representable minimum.
class StiffnessError : public SolverError {
public:
    using SolverError::SolverError;
};

// A requested feature (stable branch, zero crossing) does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

} // namespace optokerr
