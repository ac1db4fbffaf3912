#pragma once

#include <stdexcept>
#include <string>

namespace nws {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied input was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Solution evaluated at or beyond a root of h(s,t) under PolePolicy::error.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Negative h with an even root order; the real branch does not exist.
class BranchError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Spectrum not decayed at the Nyquist frequency for the requested time.
class AliasingError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace nws
