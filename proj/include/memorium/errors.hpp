#pragma once

#include <stdexcept>
#include <string>

namespace memorium {

/// Scenario/input validation failures (bad shapes, bad config values).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeError : ConfigError {
    explicit ShapeError(const std::string& what) : ConfigError(what) {}
};

/// Prolongation compatibility K(p)- != H(0).
struct ContinuityError : std::runtime_error {
    ContinuityError(const std::string& what, double mismatch)
        : std::runtime_error(what), mismatch(mismatch) {}
    double mismatch;
};

/// A lag window or evaluation point escapes the representable domain.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures: optimizer budget exhausted, objective unbounded below.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct UnboundedBelowError : NumericalError {
    explicit UnboundedBelowError(const std::string& what) : NumericalError(what) {}
};

struct BudgetError : NumericalError {
    explicit BudgetError(const std::string& what) : NumericalError(what) {}
};

/// Two internal evaluation routes disagreed beyond their error bounds.
/// Signals a quadrature/implementation bug, never bad user input.
struct InternalConsistencyError : std::runtime_error {
    explicit InternalConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace memorium
