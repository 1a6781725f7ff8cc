#include "mapping/emotion.hpp"

#include <cstdio>
#include <set>

#include "tensor/ops.hpp"

namespace evoke::mapping {

namespace {

std::size_t index_of(const VadBits& bits) {
  for (auto b : bits) {
    require(b <= 1, ErrorCode::Validation, "VAD bits must be 0 or 1");
  }
  return bits[0] * 4u + bits[1] * 2u + bits[2];
}

std::string triple(std::size_t idx) {
  return "(" + std::to_string(idx >> 2) + "," + std::to_string((idx >> 1) & 1) + "," +
         std::to_string(idx & 1) + ")";
}

}  // namespace

EmotionTable EmotionTable::defaults() {
  return EmotionTable({"neutral", "sad", "fear", "anger", "disgust", "happy", "surprise", "excited"});
}

EmotionTable EmotionTable::from_json(const Json& j) {
  require(j.is_array(), ErrorCode::Validation, "emotion table must be a JSON array");
  require(j.size() == 8, ErrorCode::Validation,
          "emotion table must have exactly 8 entries, got " + std::to_string(j.size()));
  std::array<std::optional<std::string>, 8> slots;
  std::set<std::string> seen;
  for (const auto& e : j) {
    auto bit = [&](const char* key) -> std::uint8_t {
      require(e.is_object() && e.contains(key) && e.at(key).is_number_integer(),
              ErrorCode::Validation, std::string("emotion table entry missing integer '") + key + "'");
      const int v = e.at(key).get<int>();
      require(v == 0 || v == 1, ErrorCode::Validation,
              std::string("emotion table '") + key + "' must be 0 or 1");
      return static_cast<std::uint8_t>(v);
    };
    const VadBits bits{bit("v"), bit("a"), bit("d")};
    require(e.contains("emotion") && e.at("emotion").is_string(), ErrorCode::Validation,
            "emotion table entry missing string 'emotion'");
    const std::string name = e.at("emotion").get<std::string>();
    require(!name.empty(), ErrorCode::Validation, "emotion names must be non-empty");
    const std::size_t idx = index_of(bits);
    require(!slots[idx], ErrorCode::Validation, "emotion table repeats triple " + triple(idx));
    require(seen.insert(name).second, ErrorCode::Validation,
            "emotion table repeats name '" + name + "'");
    slots[idx] = name;
  }
  std::array<std::string, 8> names;
  for (std::size_t i = 0; i < 8; ++i) {
    require(slots[i].has_value(), ErrorCode::Validation, "emotion table missing triple " + triple(i));
    names[i] = *slots[i];
  }
  require(names[0] == "neutral", ErrorCode::Validation,
          "emotion table must map (0,0,0) to \"neutral\", got \"" + names[0] + "\"");
  return EmotionTable(std::move(names));
}

EmotionTable EmotionTable::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

const std::string& EmotionTable::emotion(const VadBits& bits) const { return names_[index_of(bits)]; }

Json EmotionTable::to_json() const {
  Json out = Json::array();
  for (std::size_t i = 0; i < 8; ++i) {
    out.push_back({{"v", i >> 2}, {"a", (i >> 1) & 1}, {"d", i & 1}, {"emotion", names_[i]}});
  }
  return out;
}

AvatarManifest AvatarManifest::defaults(const EmotionTable& table) {
  AvatarManifest m;
  for (std::size_t i = 0; i < 8; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "avatar_%02zu", i);
    m.entries_[table.names()[i]] = AvatarEntry{id, std::nullopt};
  }
  return m;
}

AvatarManifest AvatarManifest::from_json(const Json& j, const EmotionTable& table) {
  require(j.is_object(), ErrorCode::Validation, "avatar manifest must be a JSON object");
  AvatarManifest m;
  for (const auto& [emotion, entry] : j.items()) {
    require(entry.is_object() && entry.contains("id") && entry.at("id").is_string(),
            ErrorCode::Validation, "avatar manifest entry '" + emotion + "' needs a string 'id'");
    AvatarEntry a{entry.at("id").get<std::string>(), std::nullopt};
    if (entry.contains("asset_path")) {
      require(entry.at("asset_path").is_string(), ErrorCode::Validation,
              "avatar manifest '" + emotion + "' asset_path must be a string");
      a.asset_path = entry.at("asset_path").get<std::string>();
    }
    m.entries_[emotion] = std::move(a);
  }
  for (const auto& name : table.names()) {
    require(m.entries_.count(name) == 1, ErrorCode::Validation,
            "avatar manifest does not cover emotion '" + name + "'");
  }
  return m;
}

AvatarManifest AvatarManifest::load(const std::filesystem::path& path, const EmotionTable& table) {
  return from_json(read_json_file(path), table);
}

const AvatarEntry& AvatarManifest::avatar(std::string_view emotion) const {
  auto it = entries_.find(emotion);
  require(it != entries_.end(), ErrorCode::Lookup,
          "no avatar for emotion '" + std::string(emotion) + "'");
  return it->second;
}

Json AvatarManifest::to_json() const {
  Json out = Json::object();
  for (const auto& [name, e] : entries_) {
    Json entry = {{"id", e.id}};
    if (e.asset_path) entry["asset_path"] = *e.asset_path;
    out[name] = entry;
  }
  return out;
}

std::string bits_to_emotion(const VadBits& bits, const EmotionTable& table) {
  return table.emotion(bits);
}

std::string emotion_to_avatar(std::string_view emotion, const AvatarManifest& manifest) {
  return manifest.avatar(emotion).id;
}

EmotionRecord record_from_logits(std::span<const float> logits, const EmotionTable& table,
                                 const AvatarManifest& manifest) {
  require(logits.size() == 3, ErrorCode::Shape, "expected 3 logits");
  EmotionRecord r;
  for (std::size_t k = 0; k < 3; ++k) {
    r.probs[k] = stable_sigmoid(static_cast<double>(logits[k]));
    r.bits[k] = r.probs[k] >= 0.5 ? 1 : 0;
  }
  r.emotion = bits_to_emotion(r.bits, table);
  r.avatar = emotion_to_avatar(r.emotion, manifest);
  return r;
}

EmotionRecord classify_window(const nn::Model& model, const Tensor<float>& window,
                              const EmotionTable& table, const AvatarManifest& manifest) {
  const Shape& d = window.dims();
  const bool single = d == Shape{4, 9, 9};
  require(single || d == Shape{1, 4, 9, 9}, ErrorCode::Shape,
          "classify_window expects [4,9,9], got " + shape_string(d));
  const Tensor<float> logits = model.predict_logits(window.reshaped({1, 4, 9, 9}));
  return record_from_logits(logits.data(), table, manifest);
}

Json to_json(const EmotionRecord& r) {
  return {{"probs", r.probs},
          {"bits", {r.bits[0], r.bits[1], r.bits[2]}},
          {"emotion", r.emotion},
          {"avatar", r.avatar}};
}

}  // namespace evoke::mapping
