#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pff {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter passed to a constructor or operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Parse failure at a specific location of a text document.
class ParseError : public Error {
 public:
  ParseError(std::string source, int line, int column, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        source_(std::move(source)),
        line_(line),
        column_(column) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string source_;
  int line_;
  int column_;
};

/// One or more semantic problems found while validating a data model.
/// All problems are collected before throwing.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out = std::to_string(problems.size()) + " validation error(s)";
    for (const auto& p : problems) out += "\n  " + p;
    return out;
  }
  std::vector<std::string> problems_;
};

/// Non-positive Jacobian determinant at a quadrature point.
class InvertedElementError : public Error {
 public:
  InvertedElementError(std::size_t element, double det_j)
      : Error("element " + std::to_string(element) +
              " is inverted or degenerate (det J = " + std::to_string(det_j) + ")"),
        element_(element) {}
  std::size_t element() const { return element_; }

 private:
  std::size_t element_;
};

/// Sparse factorization failed (zero or negative pivot) or the solve is inaccurate.
class LinearSolveError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf detected in a residual or correction norm.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// I/O failure, always carrying the offending path.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace pff
