#include <filesystem>

#include "common/json_io.hpp"
#include "doctest.h"
#include "models/checkpoint.hpp"
#include "models/model.hpp"

using namespace evoke;
using namespace evoke::nn;
namespace fs = std::filesystem;

namespace {

Tensor<float> random_input(Prng& prng, std::size_t n) {
  Tensor<float> x({n, 4, 9, 9});
  for (auto& v : x.data()) v = static_cast<float>(prng.normal());
  return x;
}

std::size_t conv_params(std::size_t cin, std::size_t cout, std::size_t k) {
  return cout * cin * k * k + cout;
}

std::size_t fc_params(std::size_t in, std::size_t out) { return out * in + out; }

}  // namespace

TEST_CASE("teacher shapes and closed-form parameter count") {
  Prng prng(1);
  const Model t = build_teacher({}, prng);
  CHECK(t.architecture() == "teacher");
  const std::size_t expected = conv_params(4, 64, 4) + conv_params(64, 128, 4) +
                               conv_params(128, 256, 4) + conv_params(256, 64, 1) +
                               fc_params(64 * 81, 1024) + fc_params(1024, 3);
  CHECK(expected == 5988867);
  CHECK(count_params(t) == expected);

  const auto ladder = t.shape_ladder({2, 4, 9, 9});
  for (std::size_t i = 0; i < t.layer_count(); ++i) {
    if (t.layers()[i].kind == LayerKind::Conv2d) {
      CHECK(ladder[i][2] == 9);
      CHECK(ladder[i][3] == 9);
    }
  }
  CHECK(t.predict_logits(random_input(prng, 2)).dims() == Shape{2, 3});
  CHECK(t.layer_count() == 12);
}

TEST_CASE("student shapes, parameter count and layer count") {
  Prng prng(2);
  const Model s = build_student({}, prng);
  const std::size_t expected =
      conv_params(4, 16, 4) + conv_params(16, 32, 4) + fc_params(32 * 81, 128) + fc_params(128, 3);
  CHECK(conv_params(4, 16, 4) == 1040);
  CHECK(conv_params(16, 32, 4) == 8224);
  CHECK(fc_params(2592, 128) == 331904);
  CHECK(fc_params(128, 3) == 387);
  CHECK(count_params(s) == expected);
  CHECK(expected == 341555);
  CHECK(std::abs(static_cast<double>(expected) - 353363.0) / 353363.0 < 0.05);
  CHECK(s.layer_count() == 8);
  for (std::size_t n : {1, 5}) CHECK(s.predict_logits(random_input(prng, n)).dims() == Shape{n, 3});

  Prng p2(3);
  const Model t = build_teacher({}, p2);
  CHECK(static_cast<double>(count_params(t)) / count_params(s) >= 15.0);
}

TEST_CASE("parameter and FLOP counting on small models") {
  Prng prng(4);
  const Model lin("custom", Json::object(), {Layer::linear("fc", 3, 2, prng)});
  CHECK(count_params(lin) == 8);
  CHECK(count_params(Model("empty", Json::object(), {})) == 0);

  const Model lin42("custom", Json::object(), {Layer::linear("fc", 4, 2, prng)});
  CHECK(count_flops(lin42, {1, 4}) == 16);
  const Model lin42r("custom", Json::object(), {Layer::linear("fc", 4, 2, prng), Layer::relu("r")});
  CHECK(count_flops(lin42r, {1, 4}) == 18);

  const Model conv1("custom", Json::object(), {Layer::conv("c1", 4, 16, 4, prng)});
  CHECK(count_flops(conv1, {1, 4, 9, 9}) == 165888);

  Prng a(5), b(6);
  const Model t = build_teacher({}, a), s = build_student({}, b);
  CHECK(count_flops(t, {1, 4, 9, 9}) > 20 * count_flops(s, {1, 4, 9, 9}));
  CHECK(count_flops(s, {3, 4, 9, 9}) == 3 * count_flops(s, {1, 4, 9, 9}));
}

TEST_CASE("same seed builds identical weights") {
  Prng a(7), b(7);
  const Model x = build_student({}, a), y = build_student({}, b);
  const auto px = x.parameters(), py = y.parameters();
  REQUIRE(px.size() == py.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    CHECK(px[i].name == py[i].name);
    CHECK(px[i].var.value() == py[i].var.value());
  }
}

TEST_CASE("model copies are deep") {
  Prng prng(8);
  const Model a = build_student({}, prng);
  Model b = a;
  b.parameters()[0].var.mutable_value()[0] += 1.0f;
  CHECK(a.parameters()[0].var.value()[0] != b.parameters()[0].var.value()[0]);
}

TEST_CASE("non-default configs round trip through JSON") {
  StudentConfig sc;
  sc.c1_channels = 8;
  sc.fc_hidden = 32;
  const StudentConfig back = student_config_from_json(to_json(sc));
  CHECK(back.c1_channels == 8);
  CHECK(back.fc_hidden == 32);
  Prng prng(9);
  const Model m = build_model("student", to_json(sc), prng);
  CHECK(count_params(m) == conv_params(4, 8, 4) + conv_params(8, 32, 4) +
                               fc_params(32 * 81, 32) + fc_params(32, 3));
  CHECK_THROWS_AS(build_model("resnet", Json::object(), prng), Error);
}

TEST_CASE("checkpoint round trip is bitwise") {
  Prng prng(10);
  const Model s = build_student({}, prng);
  const Tensor<float> x = random_input(prng, 4);
  const fs::path dir = fs::temp_directory_path() / "evoke_unit_ckpt";
  fs::create_directories(dir);
  save_checkpoint(s, {{"note", "x"}}, dir / "s.ckpt");
  const Checkpoint back = load_checkpoint(dir / "s.ckpt", "student");
  CHECK(back.metadata.at("note") == "x");
  CHECK(back.model.predict_logits(x) == s.predict_logits(x));
  CHECK(encode_checkpoint(back.model, back.metadata) == encode_checkpoint(s, {{"note", "x"}}));
}

TEST_CASE("checkpoint corruption and architecture errors") {
  Prng prng(11);
  const Model t = build_student({}, prng);
  const auto bytes = encode_checkpoint(t, Json::object());

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };

  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 100);
  CHECK(code_of([&] { decode_checkpoint(cut); }) == ErrorCode::Checksum);

  auto flipped = bytes;
  flipped[flipped.size() - 7] ^= 0x40;
  CHECK(code_of([&] { decode_checkpoint(flipped); }) == ErrorCode::Checksum);

  CHECK(code_of([&] { decode_checkpoint(bytes, "teacher"); }) == ErrorCode::Architecture);

  const std::vector<std::uint8_t> tiny(bytes.begin(), bytes.begin() + 4);
  CHECK(code_of([&] { decode_checkpoint(tiny); }) != ErrorCode::Internal);

  auto header = bytes;
  header[9] = '!';  // inside the JSON header
  CHECK(code_of([&] { decode_checkpoint(header); }) == ErrorCode::Format);
}
