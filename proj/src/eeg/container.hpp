#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tensor/tensor.hpp"

namespace evoke::eeg {

// Binary tensor container, little-endian:
//   "EVKT" | u32 version=1 | u8 dtype (1=f32) | u8 ndim | u16 reserved=0 |
//   u64 dims[ndim] | row-major payload
inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 1;

std::vector<std::uint8_t> encode_container(const Tensor<float>& tensor);
/// Errors: BadMagic, Unsupported (version/dtype), Truncated (short header or
/// payload), LengthMismatch (payload longer than the dims declare).
Tensor<float> decode_container(std::span<const std::uint8_t> bytes);

void write_container(const Tensor<float>& tensor, const std::filesystem::path& path);
Tensor<float> read_container(const std::filesystem::path& path);
/// Reads and validates only the header.
Shape read_container_dims(const std::filesystem::path& path);

}  // namespace evoke::eeg
