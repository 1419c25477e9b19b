#pragma once

#include <stdexcept>
#include <string>

namespace keb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation precondition (bad degree, wrong spec shape, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Evaluation point outside the domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Synthetic division left a remainder above tolerance.
class FactorizationError : public Error {
public:
    using Error::Error;
};

/// Two routes that must agree did not.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// The profile integrator failed or a postcondition on the solution was violated.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double last_r, double last_w)
        : Error(what + " (last r=" + std::to_string(last_r) + ", W=" + std::to_string(last_w) + ")"),
          last_r_(last_r), last_w_(last_w) {}

    double last_r() const noexcept { return last_r_; }
    double last_w() const noexcept { return last_w_; }

private:
    double last_r_;
    double last_w_;
};

/// A sign fact required by the construction failed (radicand <= 0, h near zero, ...).
class SignViolation : public Error {
public:
    using Error::Error;
};

/// A Hermitian metric is not positive definite, or a NaN/Inf came out of an evaluation.
class MetricError : public Error {
public:
    using Error::Error;
};

} // namespace keb
