#include "service/protocol.hpp"

#include <chrono>

namespace evoke::service {

std::string error_line(const std::optional<std::string>& id, const char* code) {
  Json out = Json::object();
  if (id) out["id"] = *id;
  out["error"] = code;
  return out.dump();
}

namespace {

// Fills `out` from a nested [4][9][9] array; false on any shape defect.
bool read_window(const Json& w, Tensor<float>& out) {
  if (!w.is_array() || w.size() != 4) return false;
  out = Tensor<float>({1, 4, 9, 9});
  std::size_t i = 0;
  for (const auto& plane : w) {
    if (!plane.is_array() || plane.size() != 9) return false;
    for (const auto& row : plane) {
      if (!row.is_array() || row.size() != 9) return false;
      for (const auto& v : row) {
        if (!v.is_number()) return false;
        out[i++] = v.get<float>();
      }
    }
  }
  return true;
}

}  // namespace

std::string handle_request_line(std::string_view line, const ServiceContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  if (line.size() > kMaxLineBytes) return error_line(std::nullopt, kErrTooLarge);
  Json req = Json::parse(line.begin(), line.end(), nullptr, false);
  if (req.is_discarded()) return error_line(std::nullopt, kErrParse);
  if (!req.is_object() || !req.contains("id") || !req.at("id").is_string()) {
    return error_line(std::nullopt, kErrSchema);
  }
  const std::string id = req.at("id").get<std::string>();
  if (!req.contains("window")) return error_line(id, kErrSchema);
  Tensor<float> window;
  if (!read_window(req.at("window"), window)) return error_line(id, kErrShape);
  try {
    const mapping::EmotionRecord r =
        mapping::classify_window(*ctx.model, window, *ctx.table, *ctx.manifest);
    Json out = mapping::to_json(r);
    out["id"] = id;
    out["latency_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out.dump();
  } catch (const std::exception&) {
    return error_line(id, kErrInternal);
  }
}

}  // namespace evoke::service
