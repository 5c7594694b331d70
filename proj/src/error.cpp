#include "acefd/error.hpp"

namespace acefd {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid argument";
    case ErrorKind::kConfig:
      return "configuration error";
    case ErrorKind::kInvariant:
      return "invariant violated";
    case ErrorKind::kNumeric:
      return "numeric failure";
    case ErrorKind::kIo:
      return "i/o error";
    case ErrorKind::kIndex:
      return "index out of range";
    case ErrorKind::kValidation:
      return "parameter validation failed";
    case ErrorKind::kIteration:
      return "iteration did not converge";
    case ErrorKind::kExtinction:
      return "interface extinct";
  }
  return "unknown error";
}

}  // namespace acefd
