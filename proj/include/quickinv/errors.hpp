#pragma once

#include <stdexcept>
#include <string>

namespace quickinv {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain where the requested representation exists.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidFrequency : public DomainError {
 public:
  using DomainError::DomainError;
};

class KernelSingularity : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class InsufficientTerms : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class OverflowRisk : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A corpus entry failed its registration self-test.
class RegistrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace quickinv
