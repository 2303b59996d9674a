#pragma once

#include <stdexcept>
#include <string>

namespace maxslope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point, functional or curve does not belong to the expected space.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

/// Input outside an operation's domain (bad exponent, theta outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The request violates the convexity hypotheses under which the
/// construction is valid (e.g. p' > p0 with lambda < 0, or a proximal step
/// outside the well-posedness window).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// An iterative inner solver failed to converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace maxslope
