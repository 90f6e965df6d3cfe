#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a coefficient function or formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The symbol vanishes (numerically) somewhere on the sampling grid.
class SingularSymbolError : public Error {
 public:
  using Error::Error;
};

/// log a(x, .) has no continuous periodic branch.
class WindingError : public Error {
 public:
  WindingError(double x, int winding)
      : Error("symbol has winding number " + std::to_string(winding) +
              " about the origin at x = " + std::to_string(x)),
        x_(x),
        winding_(winding) {}

  double x() const noexcept { return x_; }
  int winding() const noexcept { return winding_; }

 private:
  double x_;
  int winding_;
};

class SchemeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue iteration failed to converge.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::size_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Test function evaluated off its branch (e.g. log of a non-positive real).
class BranchError : public Error {
 public:
  using Error::Error;
};

/// Syntax error in an expression or configuration file.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        message_(what),
        line_(line),
        column_(column) {}

  /// Message without the location suffix.
  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// Semantically invalid configuration (unknown preset, bad n_list, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kms
