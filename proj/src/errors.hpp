#pragma once

#include <stdexcept>
#include <string>

namespace orss {

/// Input vector or matrix has the wrong dimension.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input contains NaN or infinity.
struct NonFiniteError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read, or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File contents violate the stream format (message carries the line number).
struct ParseError : IoError {
  using IoError::IoError;
};

/// An internal invariant failed (e.g. a matrix that is guaranteed to stay
/// positive definite lost that property). Indicates a bug, not bad input.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace orss
