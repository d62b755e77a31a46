#pragma once

#include <stdexcept>
#include <string>

namespace portopt {

/// Base class for every failure raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Rejected input: malformed files, shape mismatches, violated preconditions.
/// The command-line driver maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown: failed factorizations, degenerate data.
/// The command-line driver maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A matrix required to be positive definite is not (pivot fell below tolerance).
class NotPositiveDefiniteError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A constraint system lost row rank (its Gram matrix is numerically singular).
class RankDeficiencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The asset universe cannot support a frontier (mean vector collinear with ones).
class DegenerateUniverseError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A data series has no dispersion where dispersion is required.
class DegenerateSeriesError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Price history has a hole too wide to bridge with the nearest prior observation.
class DataGapError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A withdrawal exceeds the capital available at that point.
class InsufficientCapitalError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace portopt
