#pragma once

#include <stdexcept>
#include <string>

namespace obstacle_ridge {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ambient dimension unsupported (the Euclidean form is transient only for d >= 3).
struct DimensionError : Error {
  using Error::Error;
};

/// Mismatched vector/matrix shapes between arguments.
struct ShapeError : Error {
  using Error::Error;
};

/// Scalar parameter outside its admissible range.
struct ParamError : Error {
  using Error::Error;
};

/// Symmetric factorization failed even after jitter escalation.
struct FactorizationError : Error {
  using Error::Error;
};

/// Unregularized system is singular beyond jitter repair.
struct SingularSystemError : Error {
  using Error::Error;
};

/// Iterative search exhausted its step budget.
struct ConvergenceError : Error {
  using Error::Error;
};

/// Geometric precondition violated (overlapping balls, point inside obstacle, ...).
struct GeometryError : Error {
  using Error::Error;
};

/// Malformed CSV input; carries the position of the first offense.
struct CsvError : Error {
  CsvError(std::size_t row, std::size_t column, const std::string& what)
      : Error("csv error at row " + std::to_string(row) + ", column " +
              std::to_string(column) + ": " + what),
        row(row),
        column(column) {}
  std::size_t row;
  std::size_t column;
};

}  // namespace obstacle_ridge
