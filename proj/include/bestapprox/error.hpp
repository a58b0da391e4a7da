#pragma once

#include <stdexcept>
#include <string>

namespace bestapprox {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Unbound variable or a domain violation (sqrt of negative, log of
/// non-positive, division by zero) during expression evaluation.
class EvalError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not defined for this set / semi-norm combination.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A constraint map could not be realized at a given rival profile.
class RealizationError : public Error {
 public:
  using Error::Error;
};

/// A realized ParamBox has lower > upper in some coordinate.
class EmptyConstraintError : public RealizationError {
 public:
  using RealizationError::RealizationError;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, double violation)
      : Error(message), violation_(violation) {}
  double violation() const { return violation_; }

 private:
  double violation_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace bestapprox
