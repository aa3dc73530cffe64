#pragma once

#include <stdexcept>
#include <string>

namespace conetrace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed surface, degenerate polygon, unreadable file.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The link points are joined by a link geodesic of length pi; the
/// half Klein-Gordon kernel is not smooth there.
class GeometricSingularity : public Error {
 public:
  using Error::Error;
};

class NonConvergent : public Error {
 public:
  using Error::Error;
};

/// Search frontier exceeded the configured node budget.
class ResourceBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class GeometricTransitionPresent : public Error {
 public:
  using Error::Error;
};

class MissingCoefficient : public Error {
 public:
  using Error::Error;
};

}  // namespace conetrace
