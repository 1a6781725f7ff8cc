#pragma once

#include <stdexcept>
#include <string>

namespace evoke {

// Numeric values are part of the C ABI (see evoke_status in evoke.h).
enum class ErrorCode : int {
  InvalidArgument = 1,
  Shape = 2,
  Validation = 3,
  Io = 4,
  BadMagic = 5,
  Truncated = 6,
  LengthMismatch = 7,
  Unsupported = 8,
  Checksum = 9,
  Architecture = 10,
  Lookup = 11,
  Numeric = 12,
  Format = 13,
  Contract = 14,
  Network = 15,
  Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace evoke
