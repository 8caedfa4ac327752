#pragma once

#include <stdexcept>
#include <string>

namespace alrs {

/// Base class for all errors raised by the registration library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File could not be read, decoded or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Geometric configuration does not admit a solution (too few points,
/// collinear design, no consensus).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace alrs
