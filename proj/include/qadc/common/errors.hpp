#pragma once

#include <stdexcept>
#include <string>

namespace qadc {

/// Invalid argument or out-of-domain value handed to a library function.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request exceeded one of the desk-scale size guards.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed interferometer layout (overlapping or missing cells).
class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: negative probabilities beyond roundoff, NaN losses, etc.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Post-selection kept nothing.
class EmptyPostSelection : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Bad configuration value; `path` is the dotted field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Failure while parsing an input file; `row` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace qadc
