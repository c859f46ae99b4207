#pragma once

#include <stdexcept>
#include <string>

namespace mmb {

// Error classes map 1:1 onto the process exit codes used by the CLI and the
// status codes of the C API: validation = 1, numeric = 2, io = 3.
enum class ErrorKind : int {
  Validation = 1,
  Numeric = 2,
  Io = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad configuration, mismatched shapes, incompatible artifacts.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, what) {}
};

// Shape/rank mismatch between tensors.
class DimensionError : public ValidationError {
 public:
  explicit DimensionError(const std::string& what) : ValidationError(what) {}
};

// Invalid numeric values: non-finite inputs, zero norms with guards off,
// out-of-range labels, losses going NaN during training.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::Numeric, what) {}
};

class DomainError : public NumericError {
 public:
  explicit DomainError(const std::string& what) : NumericError(what) {}
};

// Unreadable/unwritable paths, malformed or corrupted files.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace mmb
