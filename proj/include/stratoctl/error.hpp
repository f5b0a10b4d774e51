#pragma once

#include <stdexcept>
#include <string>

namespace stratoctl {

// Base for all library failures. Usage/config problems and numerical
// failures are kept apart so the CLI can map them onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The variance target cannot be met with the requested parameters.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace stratoctl
