#include "models/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

namespace evoke::nn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

constexpr const char* kFormat = "evoke-checkpoint";
constexpr int kFormatVersion = 1;

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large payloads.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    crc = crc32(crc, bytes.data() + offset, chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_checkpoint(const Model& model, const Json& metadata) {
  std::vector<std::uint8_t> payload;
  Json index = Json::array();
  for (const auto& p : model.parameters()) {
    const auto& t = p.var.value();
    index.push_back({{"name", p.name}, {"dims", t.dims()}, {"offset", payload.size()}});
    const auto* raw = reinterpret_cast<const std::uint8_t*>(t.data().data());
    payload.insert(payload.end(), raw, raw + t.size() * sizeof(float));
  }
  const Json header = {
      {"format", kFormat},
      {"version", kFormatVersion},
      {"architecture", model.architecture()},
      {"config", model.config()},
      {"tensors", index},
      {"metadata", metadata},
      {"payload_bytes", payload.size()},
      {"crc32", crc32_of(payload)},
  };
  const std::string text = header.dump();
  const std::uint64_t len = text.size();
  std::vector<std::uint8_t> out(sizeof(len));
  std::memcpy(out.data(), &len, sizeof(len));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes,
                             std::optional<std::string> expected_architecture) {
  std::uint64_t len = 0;
  require(bytes.size() >= sizeof(len), ErrorCode::Checksum, "checkpoint: truncated length prefix");
  std::memcpy(&len, bytes.data(), sizeof(len));
  require(len <= bytes.size() - sizeof(len), ErrorCode::Checksum, "checkpoint: truncated header");

  Json header;
  try {
    header = Json::parse(bytes.begin() + sizeof(len),
                         bytes.begin() + static_cast<std::ptrdiff_t>(sizeof(len) + len));
  } catch (const Json::exception& e) {
    fail(ErrorCode::Format, std::string("checkpoint: unreadable header: ") + e.what());
  }

  std::string arch;
  std::size_t payload_bytes = 0;
  std::uint32_t crc = 0;
  try {
    require(header.at("format").get<std::string>() == kFormat, ErrorCode::Format,
            "checkpoint: not an evoke checkpoint");
    require(header.at("version").get<int>() == kFormatVersion, ErrorCode::Unsupported,
            "checkpoint: unsupported version");
    arch = header.at("architecture").get<std::string>();
    payload_bytes = header.at("payload_bytes").get<std::size_t>();
    crc = header.at("crc32").get<std::uint32_t>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::Format, std::string("checkpoint: ") + e.what());
  }
  if (arch != kTeacherTag && arch != kStudentTag) {
    fail(ErrorCode::Architecture, "checkpoint: unknown architecture tag '" + arch + "'");
  }
  if (expected_architecture && *expected_architecture != arch) {
    fail(ErrorCode::Architecture, "checkpoint holds a '" + arch + "' model, expected '" +
                                      *expected_architecture + "'");
  }

  const auto payload = bytes.subspan(sizeof(len) + len);
  require(payload.size() == payload_bytes, ErrorCode::Checksum,
          "checkpoint: payload is " + std::to_string(payload.size()) + " bytes, header declares " +
              std::to_string(payload_bytes));
  require(crc32_of(payload) == crc, ErrorCode::Checksum, "checkpoint: CRC32 mismatch");

  Prng unused(0);
  Checkpoint ck{build_model(arch, header.at("config"), unused), header.value("metadata", Json::object())};
  auto params = ck.model.parameters();
  const Json& index = header.at("tensors");
  require(index.size() == params.size(), ErrorCode::Shape,
          "checkpoint: " + std::to_string(index.size()) + " tensors for " +
              std::to_string(params.size()) + " parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Json& entry = index[i];
    auto& p = params[i];
    const Shape dims = entry.at("dims").get<Shape>();
    require(entry.at("name").get<std::string>() == p.name && dims == p.var.dims(), ErrorCode::Shape,
            "checkpoint: tensor " + entry.at("name").get<std::string>() + " " +
                shape_string(dims) + " does not match " + p.name + " " +
                shape_string(p.var.dims()));
    const auto offset = entry.at("offset").get<std::size_t>();
    const std::size_t nbytes = p.var.value().size() * sizeof(float);
    require(offset + nbytes <= payload.size(), ErrorCode::Shape,
            "checkpoint: tensor " + p.name + " overruns payload");
    std::memcpy(p.var.mutable_value().data().data(), payload.data() + offset, nbytes);
  }
  return ck;
}

void save_checkpoint(const Model& model, const Json& metadata, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(model, metadata));
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::string> expected_architecture) {
  const auto bytes = read_file_bytes(path);
  return decode_checkpoint(bytes, std::move(expected_architecture));
}

}  // namespace evoke::nn
