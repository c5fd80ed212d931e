#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace driftplan {

// Root of every error thrown by the library. Callers that only need to know
// "something failed" catch this; the subclasses carry the failure kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs outside the physical domain of a formula (lambda <= -1, |alpha| >= pi/2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Slip angles are undefined below the low-speed guard.
class LowSpeedError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NegativeSpeedError : public Error {
 public:
  using Error::Error;
};

class EmptySweepError : public Error {
 public:
  using Error::Error;
};

class InsufficientPointsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Parse failure in a text input; line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ProjectionError : public Error {
 public:
  using Error::Error;
};

class FoldOverError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class NoFeasibleNodeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace driftplan
