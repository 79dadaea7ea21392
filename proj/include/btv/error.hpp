#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace btv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A model is statically wrong: type errors, unknown names, missing
/// behaviors, non-exhaustive action guards.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Syntax or declaration error with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::uint32_t line, std::uint32_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        message_(std::move(message)),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::uint32_t line() const noexcept { return line_; }
  std::uint32_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::uint32_t line_;
  std::uint32_t column_;
};

/// An assignment tried to store a value outside its variable's declared domain.
class DomainViolation : public Error {
 public:
  DomainViolation(std::string variable, std::int64_t value)
      : Error("value " + std::to_string(value) + " outside the domain of '" + variable + "'"),
        variable_(std::move(variable)),
        value_(value) {}

  const std::string& variable() const noexcept { return variable_; }
  std::int64_t value() const noexcept { return value_; }

 private:
  std::string variable_;
  std::int64_t value_;
};

/// An event was applied in a state where its guard does not hold.
class NotEnabledError : public Error {
 public:
  using Error::Error;
};

/// The reference interpreter met a leaf with more than one enabled outcome.
class OracleInapplicable : public Error {
 public:
  using Error::Error;
};

/// A trace does not fit the model it is replayed against.
class TraceError : public Error {
 public:
  TraceError(std::string message, std::size_t step)
      : Error(std::move(message)), step_(step) {}

  /// Zero-based index of the offending step.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace btv
