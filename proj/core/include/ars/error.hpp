#pragma once

#include <stdexcept>
#include <string>

namespace ars {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  InvalidConfig,
  NonFiniteValue,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  BadRow,
  IoFailure,
  ParseFailure,
};

// All recoverable failures in the library throw this. The code makes the
// failure class testable without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace ars
