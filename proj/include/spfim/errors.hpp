#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spfim {

// Base for every error raised by the library. The C API maps each subclass
// onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A Monte Carlo replicate failed; carries the outer index and, where it
// applies, the inner index of the failing estimate.
class ReplicateError : public Error {
 public:
  ReplicateError(std::size_t outer, std::size_t inner, const std::string& what)
      : Error("replicate (i=" + std::to_string(outer) + ", k=" + std::to_string(inner) +
              ") failed: " + what),
        outer_(outer),
        inner_(inner) {}

  std::size_t outer() const { return outer_; }
  std::size_t inner() const { return inner_; }

 private:
  std::size_t outer_;
  std::size_t inner_;
};

}  // namespace spfim
