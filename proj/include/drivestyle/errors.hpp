#pragma once

#include <stdexcept>
#include <string>

namespace drivestyle {

/// Base for every error the library raises. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a documented precondition (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a usable result (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Record-level ingestion failure carrying the 1-based source line.
class RecordError : public DataError {
 public:
  RecordError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace drivestyle
