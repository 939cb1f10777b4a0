#pragma once

#include <stdexcept>
#include <string>

namespace lsflab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad grid, bad shape parameters, bad solver settings.
/// The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A stencil or probe would read outside the grid.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Point queries outside the physical box.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// |grad f| below the fence; the node is near-critical.
class DegenerateGradientError : public Error {
 public:
  using Error::Error;
};

/// Blow-up, non-convergence, or any other numerical failure.
/// The CLI maps this to exit code 1.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Contract violation by a caller (wrong kind of point, empty window, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsflab
