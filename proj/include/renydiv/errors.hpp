#pragma once

#include <stdexcept>
#include <string>

namespace renydiv {

// Input outside the mathematical domain of an operation (bad alpha, zero
// probability where positivity is required, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dimension mismatch between two distributions or count vectors.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The projection variable has zero variance, so the non-degenerate CLT does
// not apply. The message names the degenerate-regime test to use instead.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A normalized statistic is not defined for the given (m, n).
class UndefinedStatisticError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Caller asked for an incompatible combination of options.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Structurally valid input that violates a data invariant (duplicate ids, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::invalid_argument("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Filtering left no category shared by both samples.
class NoSignalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace renydiv
