#pragma once

#include <stdexcept>
#include <string>

namespace cimset {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or a violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Exact integer arithmetic left the 64-bit range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// A search exceeded its configured budget.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace cimset
