#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddinv {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments: non-finite entries, dimension mismatch, too-short signals.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// The operation is not defined for the given matrix shape (e.g. p < m for
// invariant zeros).
class UnsupportedShapeError : public Error {
 public:
  using Error::Error;
};

// No P with P * I_L = [I_m 0] exists at the requested delay.
class NoLeftInverseError : public Error {
 public:
  NoLeftInverseError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A supplied inverse gain does not satisfy P * I_L = [I_m 0].
class InvalidGainError : public Error {
 public:
  InvalidGainError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Offline data cannot support the estimator (e.g. Y has a trivial kernel).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// A right-hand side that is not a trajectory of the data-generating system.
class InconsistentTrajectoryError : public Error {
 public:
  InconsistentTrajectoryError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Offline input is not persistently exciting of the required order.
class PersistencyError : public Error {
 public:
  PersistencyError(const std::string& what, std::ptrdiff_t required_rank,
                   std::ptrdiff_t achieved_rank)
      : Error(what), required_(required_rank), achieved_(achieved_rank) {}
  std::ptrdiff_t required_rank() const { return required_; }
  std::ptrdiff_t achieved_rank() const { return achieved_; }

 private:
  std::ptrdiff_t required_;
  std::ptrdiff_t achieved_;
};

// Malformed text input. `line` is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A scenario configuration that violates its own invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddinv
