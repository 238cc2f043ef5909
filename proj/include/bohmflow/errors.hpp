#pragma once

#include <stdexcept>
#include <string>

namespace bohmflow {

/// Invalid arguments or configuration values (bad bounds, unknown variants, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Structured-text configuration could not be parsed. Carries the 1-based line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A numerical procedure broke down (singular pivot, non-finite value, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The wave packet reached the Dirichlet edges of the grid.
class ConfinementError : public NumericalError {
 public:
  ConfinementError(const std::string& message, double time);

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A physical precondition of an experiment does not hold.
class PreconditionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Reading or writing an output file failed; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bohmflow
