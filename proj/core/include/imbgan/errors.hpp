#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace imbgan {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A CSV cell could not be read as a number. Row and column are 1-based and
// count the header as row 1.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " +
              std::to_string(column) + ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

// Input table does not have the expected columns or label values.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Not enough rows of a class to satisfy a requested split.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's precondition (empty input, single class...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Internal bookkeeping mismatch, e.g. a forward cache reused with another net.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace imbgan
