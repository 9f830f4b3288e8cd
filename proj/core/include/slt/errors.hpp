#pragma once

#include <stdexcept>
#include <string>

namespace slt {

// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid layer widths (fewer than two layers, non-positive width).
struct ArchitectureError : Error {
  using Error::Error;
};

// Invalid or inconsistent configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// Dimension mismatch between tensors, masks, or datasets.
struct ShapeError : Error {
  using Error::Error;
};

// An operation that needs at least one sample received none.
struct EmptyDataError : Error {
  using Error::Error;
};

// Numerical failure: divergence, non-finite values, eigensolver breakdown.
struct NumericsError : Error {
  explicit NumericsError(const std::string& msg, int where = -1)
      : Error(msg), where_index(where) {}
  // Epoch or iteration at which the failure occurred, -1 if not applicable.
  int where_index;
};

// Malformed file contents (CSV, JSON, digits file).
struct FormatError : Error {
  using Error::Error;
};

// Statistics over an insufficient or degenerate sample.
struct StatError : Error {
  using Error::Error;
};

// Filesystem failure, or refusal to overwrite existing outputs.
struct IoError : Error {
  using Error::Error;
};

}  // namespace slt
