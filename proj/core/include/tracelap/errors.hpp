#pragma once

#include <stdexcept>
#include <string>

namespace tracelap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operation (indefinite matrix, node at a pole, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge or an internal consistency check failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Exponent range exceeded.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual or JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracelap
