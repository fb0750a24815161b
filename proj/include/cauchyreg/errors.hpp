#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cauchyreg {

// Raised when a statistic cannot be formed from the data at hand (zero
// denominators, identical group statistics, perfect fits). The Monte Carlo
// engine counts these as non-rejections.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDenominatorError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class DegenerateGroupsError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class DegenerateVarianceError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class SingularDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wald test: the sign-instrument cross-product matrix is singular. When two
// predictors have identical (or mirrored) sign patterns the offending pair is
// recorded; otherwise both indices are npos.
class SignDegeneracyError : public SingularDesignError {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  SignDegeneracyError(const std::string& what, std::size_t first, std::size_t second)
      : SingularDesignError(what), pair_(first, second) {}

  std::pair<std::size_t, std::size_t> offending_pair() const { return pair_; }

 private:
  std::pair<std::size_t, std::size_t> pair_;
};

class PartitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row, std::string column)
      : std::runtime_error(what), row_(row), column_(std::move(column)) {}

  // 1-based line number in the source file (header is line 1).
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::invalid_argument {
 public:
  SchemaError(const std::string& what, std::string key)
      : std::invalid_argument(what), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace cauchyreg
