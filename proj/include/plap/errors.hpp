#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Argument outside the mathematical domain of an operation (p <= 1, |s| > 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method did not reach its tolerance, or an integrator
/// step was too coarse for the requested accuracy.
class NonconvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The zero-count ordering predicate was not monotone across a bracket.
class BracketError : public NonconvergenceError {
public:
    using NonconvergenceError::NonconvergenceError;
};

/// Degenerate numerical input, e.g. a Rayleigh quotient with zero denominator.
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace plap
