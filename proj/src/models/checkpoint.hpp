#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "models/model.hpp"

namespace evoke::nn {

// File layout: u64 LE header length | UTF-8 JSON header | f32 LE payload.
// The header carries the architecture tag, config, tensor index (name, dims,
// byte offset), training metadata and the CRC32 of the payload.
struct Checkpoint {
  Model model;
  Json metadata = Json::object();
};

std::vector<std::uint8_t> encode_checkpoint(const Model& model, const Json& metadata);

/// Errors: Checksum (truncated or CRC mismatch), Format (unreadable header),
/// Architecture (unknown tag, or not `expected_architecture`), Shape (index
/// dims disagree with the architecture).
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes,
                             std::optional<std::string> expected_architecture = std::nullopt);

void save_checkpoint(const Model& model, const Json& metadata, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::string> expected_architecture = std::nullopt);

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

}  // namespace evoke::nn
