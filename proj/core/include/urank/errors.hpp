#pragma once

#include <stdexcept>
#include <string>

namespace urank {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (n < 2, alpha outside [0,1], ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The operation needs something the model does not provide, typically a
/// finite support or discrete labels for exact enumeration.
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, failed cross-checks or failed convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (CSV/JSON rows, dimension mismatches).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace urank
