#pragma once

#include <stdexcept>
#include <string>

namespace ssat {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, detections, configs).
class InputError : public Error {
 public:
  using Error::Error;
};

// A geometric quantity that the math cannot handle (zero-perimeter track box).
class DegenerateGeometry : public InputError {
 public:
  using InputError::InputError;
};

// An internal invariant did not hold. Indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssat
