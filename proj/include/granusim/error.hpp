#pragma once

#include <stdexcept>
#include <string>

namespace granusim {

// Values double as process exit codes for the command-line tool.
enum class ErrorKind : int {
  kUsage = 2,
  kData = 3,
  kNumeric = 4,
  kRemote = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad configuration or arguments supplied by the caller.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

/// Malformed, inconsistent or missing input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

/// Solver or numerical failure.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::kNumeric, what) {}
};

/// Embedding service unreachable or misbehaving.
class RemoteError : public Error {
 public:
  explicit RemoteError(const std::string& what) : Error(ErrorKind::kRemote, what) {}
};

}  // namespace granusim
