#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsal {

/// Base class of every error raised by the library. The CLI maps these to
/// exit status 2 (data error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index or vector length inconsistent with the declared dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A non-finite intermediate value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A metric that is not defined for the given input (e.g. a single class).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// The evaluation protocol cannot be carried out on this data.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number and the field name.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace gsal
