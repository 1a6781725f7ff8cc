#include <functional>
#include <set>

#include "doctest.h"
#include "mapping/emotion.hpp"

using namespace evoke;
using namespace evoke::mapping;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

// Student whose output ignores the input: last weight zeroed, bias = ±50.
nn::Model saturated_student(const VadBits& bits) {
  Prng prng(1);
  nn::Model m = nn::build_student({}, prng);
  auto params = m.parameters();
  auto& w = params[params.size() - 2].var.mutable_value();
  auto& b = params.back().var.mutable_value();
  for (auto& v : w.data()) v = 0.0f;
  for (std::size_t k = 0; k < 3; ++k) b[k] = bits[k] ? 50.0f : -50.0f;
  return m;
}

}  // namespace

TEST_CASE("default table is a bijection with neutral at zero") {
  const auto t = EmotionTable::defaults();
  std::set<std::string> names;
  for (std::uint8_t v = 0; v < 2; ++v)
    for (std::uint8_t a = 0; a < 2; ++a)
      for (std::uint8_t d = 0; d < 2; ++d) names.insert(t.emotion({v, a, d}));
  CHECK(names.size() == 8);
  CHECK(t.emotion({0, 0, 0}) == "neutral");
  CHECK(bits_to_emotion({1, 1, 1}, t) == "excited");
  CHECK(bits_to_emotion({1, 0, 1}, t) == "happy");
  CHECK(code_of([&] { t.emotion({2, 0, 0}); }) == ErrorCode::Validation);
  CHECK(EmotionTable::from_json(t.to_json()).names() == t.names());
}

TEST_CASE("custom tables report the precise defect") {
  Json j = EmotionTable::defaults().to_json();
  CHECK(code_of([&] { EmotionTable::from_json(Json::object()); }) == ErrorCode::Validation);

  Json short_table = j;
  short_table.erase(short_table.size() - 1);
  CHECK(code_of([&] { EmotionTable::from_json(short_table); }) == ErrorCode::Validation);

  Json dup = j;
  dup[1]["emotion"] = dup[2]["emotion"];
  try {
    EmotionTable::from_json(dup);
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("emotion") != std::string::npos);
  }

  Json bad_bit = j;
  bad_bit[3]["v"] = 2;
  CHECK(code_of([&] { EmotionTable::from_json(bad_bit); }) == ErrorCode::Validation);

  // neutral must stay at (0,0,0)
  Json swapped = j;
  std::swap(swapped[0]["emotion"], swapped[7]["emotion"]);
  CHECK(code_of([&] { EmotionTable::from_json(swapped); }) == ErrorCode::Validation);
}

TEST_CASE("avatar manifest coverage") {
  const auto t = EmotionTable::defaults();
  const auto m = AvatarManifest::defaults(t);
  std::set<std::string> ids;
  for (const auto& name : t.names()) ids.insert(emotion_to_avatar(name, m));
  CHECK(ids.size() == 8);
  CHECK(emotion_to_avatar("neutral", m) == "avatar_00");
  CHECK(code_of([&] { m.avatar("bored"); }) == ErrorCode::Lookup);

  Json j = m.to_json();
  j["happy"]["asset_path"] = "assets/happy.glb";
  const auto custom = AvatarManifest::from_json(j, t);
  REQUIRE(custom.avatar("happy").asset_path.has_value());
  CHECK(*custom.avatar("happy").asset_path == "assets/happy.glb");

  j.erase("sad");
  CHECK(code_of([&] { AvatarManifest::from_json(j, t); }) == ErrorCode::Validation);
}

TEST_CASE("records from logits") {
  const auto t = EmotionTable::defaults();
  const auto m = AvatarManifest::defaults(t);
  const std::vector<float> logits{0.0f, -3.0f, 2.0f};
  const EmotionRecord r = record_from_logits(logits, t, m);
  CHECK(r.probs[0] == 0.5);
  CHECK(r.bits == VadBits{1, 0, 1});
  CHECK(r.emotion == "happy");
  CHECK(r.avatar == m.avatar("happy").id);
  const Json j = to_json(r);
  CHECK(j.at("emotion") == "happy");
  CHECK(j.at("bits").size() == 3);
  CHECK(code_of([&] { record_from_logits(std::vector<float>{1, 2}, t, m); }) == ErrorCode::Shape);
}

TEST_CASE("classify_window reaches every corner of the table") {
  const auto t = EmotionTable::defaults();
  const auto m = AvatarManifest::defaults(t);
  Prng prng(2);
  Tensor<float> window({4, 9, 9});
  for (auto& v : window.data()) v = static_cast<float>(prng.normal());
  for (std::uint8_t idx = 0; idx < 8; ++idx) {
    const VadBits bits{static_cast<std::uint8_t>(idx >> 2), static_cast<std::uint8_t>((idx >> 1) & 1),
                       static_cast<std::uint8_t>(idx & 1)};
    const auto rec = classify_window(saturated_student(bits), window, t, m);
    CHECK(rec.bits == bits);
    CHECK(rec.emotion == t.names()[idx]);
  }
  const auto model = saturated_student({0, 0, 0});
  CHECK(classify_window(model, Tensor<float>({1, 4, 9, 9}), t, m).emotion == "neutral");
  CHECK(code_of([&] { classify_window(model, Tensor<float>({2, 4, 9, 9}), t, m); }) == ErrorCode::Shape);
}
