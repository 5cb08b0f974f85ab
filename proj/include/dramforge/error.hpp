#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dramforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, dimension mismatches, bad run settings.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// NaN log-densities, covariance factorizations that never become positive definite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::int64_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::int64_t line() const noexcept { return line_; }

 private:
  std::int64_t line_;
};

/// Raised when existing outputs forbid starting or resuming a run.
class ResumeRefused : public Error {
 public:
  using Error::Error;
};

}  // namespace dramforge
