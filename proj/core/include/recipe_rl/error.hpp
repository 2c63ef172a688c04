#pragma once

#include <stdexcept>
#include <string>

namespace recipe_rl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGridError : public Error {
 public:
  using Error::Error;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class InvalidIndexError : public Error {
 public:
  using Error::Error;
};

class InvalidActionError : public Error {
 public:
  using Error::Error;
};

/// A table-lookup predictor was asked for a state it has no row for.
class IncompleteTableError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, std::size_t missing)
      : Error(what), missing_(missing) {}
  std::size_t missing() const noexcept { return missing_; }

 private:
  std::size_t missing_;
};

class FingerprintMismatchError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace recipe_rl
