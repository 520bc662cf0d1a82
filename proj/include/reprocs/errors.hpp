#ifndef REPROCS_ERRORS_HPP
#define REPROCS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace reprocs {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent or malformed configuration (bad dimensions in a config,
// unknown keys, infeasible parameter combinations).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Shape mismatch between runtime arguments.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A generator was asked to produce a sequence outside its motion model
// (e.g. Example-1 step bounds violated, constructive partition invalid).
class ModelError : public Error {
public:
    using Error::Error;
};

// Exact enumeration was requested beyond the subset budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// An iterative solver failed to reach its target accuracy.  Carries the
// last residual so callers can decide whether the result is usable.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

// Numerically degenerate input (rank-deficient LS system, nonpositive
// spectral gap, non-PSD matrix where one is required).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, double witness = 0.0)
        : Error(what), witness_(witness) {}
    // Offending quantity, e.g. the smallest singular value.
    double witness() const { return witness_; }

private:
    double witness_ = 0.0;
};

}  // namespace reprocs

#endif  // REPROCS_ERRORS_HPP
