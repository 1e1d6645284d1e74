#pragma once

#include <stdexcept>
#include <string>

namespace qml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: specs, configs, expressions, out-of-range arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Arguments that violate an operation's documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace qml
