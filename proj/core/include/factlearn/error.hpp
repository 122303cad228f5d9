#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace factlearn {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV input. `row` is the 1-based data row (header excluded).
class CsvError : public Error {
 public:
  CsvError(const std::string& message, std::size_t row, std::string column)
      : Error(message), row_(row), column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// Unknown relations/attributes, duplicate names, kind mismatches.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A variable order that violates its structural invariants.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity showed up during training or scaling.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The oracle join would exceed its row guard.
class JoinTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace factlearn
