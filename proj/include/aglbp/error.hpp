#pragma once

#include <stdexcept>
#include <string>

namespace aglbp {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  usage,      // bad parameters or configuration
  data,       // unreadable/malformed input, shape mismatches between inputs
  invariant,  // an internal invariant was violated
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Unsupported file or channel layout.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// Image or field too small for the requested operation.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// Sampling position too close to a border.
class OutOfBoundsError : public Error {
 public:
  explicit OutOfBoundsError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// Two operands that must agree in layout do not.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// Requested table would be too large.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

}  // namespace aglbp
