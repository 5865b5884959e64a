#pragma once

#include <stdexcept>
#include <string>

namespace coulell {

/// Bad user input (malformed kernel files, preset constraint violations,
/// odd-frequency content in projection data). CLI maps these to exit 3.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EvennessViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidPreset : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Arguments outside an operation's mathematical domain (|lambda| >= 1,
/// nonpositive semi-axes, evaluation point outside an ellipse, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutsideDomain : public DomainError {
public:
    using DomainError::DomainError;
};

class CoincidentParticles : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateCloud : public DomainError {
public:
    using DomainError::DomainError;
};

/// Numerical failures of iterative procedures. CLI maps these to exit 2.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoConvergence : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

/// The Newton iterate left the admissible parameter region; the
/// perturbation is too large for the elliptic ansatz.
class LeftDomain : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

class Stall : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

class QuadratureBudgetExceeded : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

class ExtrapolationUnstable : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

} // namespace coulell
