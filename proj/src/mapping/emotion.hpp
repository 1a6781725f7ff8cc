#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "common/json_io.hpp"
#include "models/model.hpp"

namespace evoke::mapping {

/// (valence, arousal, dominance) bits.
using VadBits = std::array<std::uint8_t, 3>;

/// Bijection from the eight VAD bit triples to emotion names, with (0,0,0)
/// always "neutral".
class EmotionTable {
 public:
  /// neutral, sad, fear, anger, disgust, happy, surprise, excited for
  /// vad = 000, 001, 010, 011, 100, 101, 110, 111.
  static EmotionTable defaults();
  /// Array of 8 objects {v, a, d, emotion}; throws ErrorCode::Validation with
  /// the precise defect otherwise.
  static EmotionTable from_json(const Json& j);
  static EmotionTable load(const std::filesystem::path& path);

  const std::string& emotion(const VadBits& bits) const;
  const std::array<std::string, 8>& names() const { return names_; }
  Json to_json() const;

 private:
  explicit EmotionTable(std::array<std::string, 8> names) : names_(std::move(names)) {}
  std::array<std::string, 8> names_;  // index v*4 + a*2 + d
};

struct AvatarEntry {
  std::string id;
  std::optional<std::string> asset_path;
};

class AvatarManifest {
 public:
  /// "avatar_NN" where NN is the table index of the emotion.
  static AvatarManifest defaults(const EmotionTable& table);
  /// Object emotion -> {id, asset_path?}; must cover every emotion in `table`.
  static AvatarManifest from_json(const Json& j, const EmotionTable& table);
  static AvatarManifest load(const std::filesystem::path& path, const EmotionTable& table);

  /// Throws ErrorCode::Lookup for emotions absent from the manifest.
  const AvatarEntry& avatar(std::string_view emotion) const;
  const std::map<std::string, AvatarEntry, std::less<>>& entries() const { return entries_; }
  Json to_json() const;

 private:
  std::map<std::string, AvatarEntry, std::less<>> entries_;
};

struct EmotionRecord {
  std::array<double, 3> probs{};
  VadBits bits{};
  std::string emotion;
  std::string avatar;
};

std::string bits_to_emotion(const VadBits& bits, const EmotionTable& table);
std::string emotion_to_avatar(std::string_view emotion, const AvatarManifest& manifest);

/// probs = sigmoid(logits), bits = probs >= 0.5, then the two lookups.
EmotionRecord record_from_logits(std::span<const float> logits, const EmotionTable& table,
                                 const AvatarManifest& manifest);

/// window: [4,9,9] or [1,4,9,9].
EmotionRecord classify_window(const nn::Model& model, const Tensor<float>& window,
                              const EmotionTable& table, const AvatarManifest& manifest);

Json to_json(const EmotionRecord& record);

}  // namespace evoke::mapping
