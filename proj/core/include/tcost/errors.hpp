#pragma once

#include <stdexcept>
#include <string>

namespace tcost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter or configuration outside its documented range.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// State coordinate outside [0, log(u/l)] beyond the clamping tolerance.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The gap residual does not change sign on the search bracket. Usually the
/// spread is too wide for the small-spread regime in which the gap exists.
class NoBracketError : public Error {
 public:
  using Error::Error;
};

class MaxIterExceededError : public Error {
 public:
  using Error::Error;
};

/// exp(-alpha * wealth) left the representable range.
class OverflowGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcost
