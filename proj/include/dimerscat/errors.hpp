#pragma once

#include <stdexcept>
#include <string>

namespace dimerscat {

/// Invalid parameters or a violated precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of the numerical pipeline (exit code 2 in the CLI).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(const std::string& what, int rank, int columns)
      : NumericalError(what), rank_(rank), columns_(columns) {}

  int rank() const noexcept { return rank_; }
  int columns() const noexcept { return columns_; }

 private:
  int rank_;
  int columns_;
};

/// A moment needed by the matching equations was never tabulated.
class MissingMomentError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dimerscat
