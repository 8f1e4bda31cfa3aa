#pragma once

#include <stdexcept>
#include <string>

namespace lejapce {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, bad configuration files, inconsistent dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (e.g. quantile level, degree).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition the caller is responsible for was violated.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Breakdown of a numerical procedure (singular system, Stieltjes failure, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A model evaluation failed or returned a non-finite value.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace lejapce
