#pragma once

#include <stdexcept>
#include <string>

namespace moduli {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite coordinates, malformed specs, points off the unit sphere.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A norm description that does not define a symmetric convex gauge.
class RepresentationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the legal domain of a modulus or construction.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inputs violate a stated precondition (e.g. y is not quasi-orthogonal to x).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// No feasible configuration exists.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace moduli
