#pragma once

#include <stdexcept>
#include <string>

namespace unfold {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad k, bad shape, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A matrix that must be positive definite is not, an eigensolver failed, or
/// a linear system is singular.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// The neighborhood graph has more than one connected component.
class DisconnectedGraph : public Error {
public:
  using Error::Error;
};

}  // namespace unfold
