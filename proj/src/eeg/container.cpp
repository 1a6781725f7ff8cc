#include "eeg/container.hpp"

#include <bit>
#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

#include "common/json_io.hpp"

namespace evoke::eeg {

namespace {

static_assert(std::endian::native == std::endian::little,
              "container encoding assumes a little-endian host");

constexpr std::array<std::uint8_t, 4> kMagic{'E', 'V', 'K', 'T'};
constexpr std::size_t kFixedHeader = 12;

template <typename U>
void put(std::vector<std::uint8_t>& out, U value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(U));
}

template <typename U>
U get(std::span<const std::uint8_t> bytes, std::size_t offset) {
  U value;
  std::memcpy(&value, bytes.data() + offset, sizeof(U));
  return value;
}

struct Header {
  Shape dims;
  std::size_t payload_offset;
};

Header decode_header(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), bytes.begin()),
          ErrorCode::BadMagic, "container: bad magic");
  require(bytes.size() >= kFixedHeader, ErrorCode::Truncated, "container: truncated header");
  const auto version = get<std::uint32_t>(bytes, 4);
  require(version == kContainerVersion, ErrorCode::Unsupported,
          "container: unsupported version " + std::to_string(version));
  const auto dtype = get<std::uint8_t>(bytes, 8);
  require(dtype == kDtypeFloat32, ErrorCode::Unsupported,
          "container: unsupported dtype code " + std::to_string(dtype));
  const auto ndim = get<std::uint8_t>(bytes, 9);
  require(ndim >= 1, ErrorCode::Format, "container: zero dimensions");
  const std::size_t offset = kFixedHeader + 8 * std::size_t{ndim};
  require(bytes.size() >= offset, ErrorCode::Truncated, "container: truncated dims");
  Header h{{}, offset};
  for (std::size_t i = 0; i < ndim; ++i) {
    const auto d = get<std::uint64_t>(bytes, kFixedHeader + 8 * i);
    require(d > 0, ErrorCode::Format, "container: zero extent");
    h.dims.push_back(static_cast<std::size_t>(d));
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_container(const Tensor<float>& tensor) {
  require(tensor.rank() >= 1 && tensor.rank() <= 255, ErrorCode::Shape,
          "container: rank must be 1..255");
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put<std::uint32_t>(out, kContainerVersion);
  put<std::uint8_t>(out, kDtypeFloat32);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.rank()));
  put<std::uint16_t>(out, 0);
  for (std::size_t d : tensor.dims()) put<std::uint64_t>(out, d);
  const auto* p = reinterpret_cast<const std::uint8_t*>(tensor.data().data());
  out.insert(out.end(), p, p + tensor.size() * sizeof(float));
  return out;
}

Tensor<float> decode_container(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes);
  const std::size_t expected = shape_size(h.dims) * sizeof(float);
  const std::size_t actual = bytes.size() - h.payload_offset;
  require(actual >= expected, ErrorCode::Truncated,
          "container: truncated payload (" + std::to_string(actual) + " of " +
              std::to_string(expected) + " bytes)");
  require(actual == expected, ErrorCode::LengthMismatch,
          "container: payload holds " + std::to_string(actual) + " bytes, dims declare " +
              std::to_string(expected));
  std::vector<float> data(shape_size(h.dims));
  std::memcpy(data.data(), bytes.data() + h.payload_offset, expected);
  return Tensor<float>(h.dims, std::move(data));
}

void write_container(const Tensor<float>& tensor, const std::filesystem::path& path) {
  write_file_bytes(path, encode_container(tensor));
}

Tensor<float> read_container(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_container(bytes);
}

Shape read_container_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> head(kFixedHeader + 8 * 255);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  return decode_header(head).dims;
}

}  // namespace evoke::eeg
