#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mapping/emotion.hpp"

namespace evoke::service {

/// Lines longer than this are answered with {"error":"too_large"}.
inline constexpr std::size_t kMaxLineBytes = std::size_t{1} << 20;

/// Read-only state shared by every connection.
struct ServiceContext {
  const nn::Model* model = nullptr;
  const mapping::EmotionTable* table = nullptr;
  const mapping::AvatarManifest* manifest = nullptr;
};

// Error codes carried in {"id"?, "error": code}.
inline constexpr const char* kErrParse = "parse";
inline constexpr const char* kErrSchema = "schema";
inline constexpr const char* kErrShape = "shape";
inline constexpr const char* kErrTooLarge = "too_large";
inline constexpr const char* kErrInternal = "internal";

/// One request line {"id": str, "window": [4][9][9]} to one response line
/// {"id","probs","bits","emotion","avatar","latency_ms"}, without the
/// trailing newline. Never throws.
std::string handle_request_line(std::string_view line, const ServiceContext& ctx);

std::string error_line(const std::optional<std::string>& id, const char* code);

}  // namespace evoke::service
