#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqf {

// Argument outside the mathematical domain of an operation (t outside [0, tau],
// Q* < 1, empty distribution, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A protocol or problem could not be built from the given parameters.
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs violate an operation's contract (mismatched protocol/trajectory, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed configuration or file contents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Base for failures of the numerics themselves.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PropagationError : public NumericalError {
 public:
  PropagationError(std::size_t segment, const std::string& what)
      : NumericalError("segment " + std::to_string(segment) + ": " + what), segment_(segment) {}

  std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t segment_;
};

class NotPureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InconsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sqf
