#pragma once

#include <stdexcept>
#include <string>

namespace scv {

// Thrown for malformed descriptor strings and for parameters outside a
// kind's admissible regime (detectable before any evaluation).
struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an evaluation leaves an integrand's domain (e.g. an inverse
// transform applied at a matrix with non-positive determinant).
struct EvalDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Thrown when a caller violates a documented precondition of a check.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a quadrature fails to reach the requested tolerance within
// its depth budget; integrals never silently return garbage.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace scv
