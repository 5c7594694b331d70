#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acefd {

// Error categories. The numeric values of kConfig, kInvariant and kNumeric
// double as CLI exit codes.
enum class ErrorKind : int {
  kInvalidArgument = 1,
  kConfig = 2,
  kInvariant = 3,
  kNumeric = 4,
  kIo = 5,
  kIndex = 6,
  kValidation = 7,
  kIteration = 8,
  kExtinction = 9,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what)
      : Error(ErrorKind::kIndex, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

// A maximum-principle parameter condition does not hold.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

// A runtime invariant (bounded xi, max norm, energy decay) was broken while
// running in validated mode.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ErrorKind::kInvariant, what) {}
};

// Non-finite values appeared. `node` is the flat index of the first one.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t node)
      : Error(ErrorKind::kNumeric, what), node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class IterationError : public Error {
 public:
  IterationError(const std::string& what, double residual)
      : Error(ErrorKind::kIteration, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The tracked interface has vanished (radius no longer defined).
class ExtinctionError : public Error {
 public:
  explicit ExtinctionError(const std::string& what)
      : Error(ErrorKind::kExtinction, what) {}
};

}  // namespace acefd
