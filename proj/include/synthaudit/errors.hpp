#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synthaudit {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// dataset / IO
// ---------------------------------------------------------------------------

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& column)
      : Error("schema mismatch on column '" + column + "'"), column(column) {}
  std::string column;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& column, const std::string& token)
      : Error("cannot parse '" + token + "' at row " + std::to_string(row) +
              ", column '" + column + "'"),
        row(row),
        column(column) {}
  std::size_t row;  // 1-based data row
  std::string column;
};

class MissingTarget : public Error {
 public:
  explicit MissingTarget(std::size_t row)
      : Error("missing target value at row " + std::to_string(row)), row(row) {}
  std::size_t row;
};

class AllMissingColumn : public Error {
 public:
  explicit AllMissingColumn(const std::string& column)
      : Error("column '" + column + "' has no observed value"), column(column) {}
  std::string column;
};

class NotNumeric : public Error {
 public:
  explicit NotNumeric(const std::string& column)
      : Error("column '" + column + "' is not numeric"), column(column) {}
  std::string column;
};

class NonBinaryTarget : public Error {
 public:
  NonBinaryTarget() : Error("target column must take values in {0,1}") {}
};

// ---------------------------------------------------------------------------
// models / numerics
// ---------------------------------------------------------------------------

class DegenerateTarget : public Error {
 public:
  DegenerateTarget() : Error("target contains a single class") {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              " columns, got " + std::to_string(got)) {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero vector has no direction") {}
};

class InvalidSigma : public Error {
 public:
  InvalidSigma() : Error("kernel bandwidth must be positive") {}
};

class DegenerateSample : public Error {
 public:
  DegenerateSample() : Error("pooled sample has fewer than two distinct values") {}
};

class TooFewFeatures : public Error {
 public:
  TooFewFeatures() : Error("at least two features required") {}
};

class TooFewRows : public Error {
 public:
  explicit TooFewRows(std::size_t needed)
      : Error("at least " + std::to_string(needed) + " rows required") {}
};

class DegenerateData : public Error {
 public:
  DegenerateData() : Error("data carries no variance") {}
};

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

class SensitiveNotFound : public Error {
 public:
  explicit SensitiveNotFound(const std::string& column)
      : Error("sensitive column '" + column + "' not in schema"), column(column) {}
  std::string column;
};

class EmptyPublicSet : public Error {
 public:
  EmptyPublicSet() : Error("public feature set is empty") {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

}  // namespace synthaudit
