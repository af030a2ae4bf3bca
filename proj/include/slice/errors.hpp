#pragma once

#include <stdexcept>
#include <string>

namespace slice {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input that is the caller's fault: malformed config, unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownSystem : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DimensionMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Anything raised while the mathematics itself is being evaluated.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ContainmentError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InconsistentSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AmbiguityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SplittingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvarianceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ChartError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace slice
