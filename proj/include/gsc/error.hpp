#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsc {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value fell outside the domain of a formula: a violated precondition,
/// a division by zero, or an exponential that no longer fits in a double.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based; 0 means "whole input".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gsc
