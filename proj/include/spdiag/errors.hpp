#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spdiag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A referenced column, feature or override name does not exist.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data. `row()` is the 1-based data row (header excluded).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Buffer exclusion removed every training observation.
class ExhaustedBufferError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

}  // namespace spdiag
