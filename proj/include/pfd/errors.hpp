#pragma once

#include <stdexcept>

namespace pfd {

// Invalid argument: wrong simplex, bad metric, eps out of range, size mismatch.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A log or ratio of a zero mass was requested.
struct BoundaryError : std::domain_error {
  using std::domain_error::domain_error;
};

// The operation needs data the handle does not carry (e.g. a closed-form influence).
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

// Floating-point breakdown: non-finite objective, solver failure.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An inner optimizer kept regressing; learning rate too high.
struct DivergenceError : NumericalError {
  using NumericalError::NumericalError;
};

// Bad run configuration: unknown preset, missing key, mismatched context.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pfd
