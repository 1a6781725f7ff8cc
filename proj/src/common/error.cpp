#include "common/error.hpp"

namespace evoke {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Io: return "io";
    case ErrorCode::BadMagic: return "bad_magic";
    case ErrorCode::Truncated: return "truncated_payload";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Checksum: return "checksum";
    case ErrorCode::Architecture: return "architecture";
    case ErrorCode::Lookup: return "lookup";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::Format: return "format";
    case ErrorCode::Contract: return "contract";
    case ErrorCode::Network: return "network";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace evoke
