// Links only the shared library; sees nothing but the public header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "evoke/evoke.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  evoke_string_free(s);
  return out;
}

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / "evoke_capi" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(evoke_version()).size() > 0);
  CHECK(std::string(evoke_status_name(EVOKE_OK)) == "ok");
  CHECK(std::string(evoke_status_name(EVOKE_ERR_CHECKSUM)) == "checksum");
  evoke_string_free(nullptr);
}

TEST_CASE("null arguments are rejected, not crashed on") {
  evoke_model* m = nullptr;
  CHECK(evoke_model_load(nullptr, nullptr, &m) == EVOKE_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::string(evoke_last_error()).size() > 0);
  CHECK(evoke_model_forward(nullptr, nullptr, 1, nullptr) == EVOKE_ERR_INVALID_ARGUMENT);
  evoke_model_free(nullptr);
  evoke_mapper_free(nullptr);
  evoke_server_free(nullptr);
}

TEST_CASE("model lifecycle through the C boundary") {
  evoke_model* m = nullptr;
  REQUIRE(evoke_model_create("student", nullptr, 7, &m) == EVOKE_OK);
  char* info = nullptr;
  REQUIRE(evoke_model_info_json(m, &info) == EVOKE_OK);
  const std::string info_s = take(info);
  CHECK(info_s.find("341555") != std::string::npos);

  std::vector<float> input(2 * 4 * 9 * 9, 0.25f), a(6), b(6);
  REQUIRE(evoke_model_forward(m, input.data(), 2, a.data()) == EVOKE_OK);

  const fs::path dir = scratch("model");
  fs::create_directories(dir);
  const std::string path = (dir / "s.ckpt").string();
  REQUIRE(evoke_model_save(m, path.c_str(), R"({"note":"capi"})") == EVOKE_OK);

  evoke_model* back = nullptr;
  REQUIRE(evoke_model_load(path.c_str(), "student", &back) == EVOKE_OK);
  REQUIRE(evoke_model_forward(back, input.data(), 2, b.data()) == EVOKE_OK);
  CHECK(a == b);

  evoke_model* wrong = nullptr;
  CHECK(evoke_model_load(path.c_str(), "teacher", &wrong) == EVOKE_ERR_ARCHITECTURE);
  CHECK(wrong == nullptr);
  CHECK(evoke_model_create("resnet", nullptr, 1, &wrong) != EVOKE_OK);

  // truncated file
  fs::resize_file(path, fs::file_size(path) - 16);
  CHECK(evoke_model_load(path.c_str(), nullptr, &wrong) == EVOKE_ERR_CHECKSUM);
  CHECK(evoke_model_load((dir / "missing.ckpt").string().c_str(), nullptr, &wrong) == EVOKE_ERR_IO);

  evoke_model_free(back);
  evoke_model_free(m);
}

TEST_CASE("mapper lookups") {
  evoke_mapper* mp = nullptr;
  REQUIRE(evoke_mapper_create(nullptr, nullptr, &mp) == EVOKE_OK);
  char* emotion = nullptr;
  char* avatar = nullptr;
  REQUIRE(evoke_mapper_names(mp, 0, 0, 0, &emotion, &avatar) == EVOKE_OK);
  CHECK(take(emotion) == "neutral");
  CHECK(take(avatar) == "avatar_00");
  char* js = nullptr;
  REQUIRE(evoke_mapper_lookup(mp, 1, 1, 1, &js) == EVOKE_OK);
  CHECK(take(js).find("excited") != std::string::npos);
  CHECK(evoke_mapper_names(mp, 2, 0, 0, &emotion, nullptr) == EVOKE_ERR_VALIDATION);

  const fs::path dir = scratch("table");
  fs::create_directories(dir);
  const std::string bad = (dir / "bad.json").string();
  std::FILE* f = std::fopen(bad.c_str(), "w");
  std::fputs("[{\"v\":0,\"a\":0,\"d\":0,\"emotion\":\"neutral\"}]", f);
  std::fclose(f);
  evoke_mapper* other = nullptr;
  CHECK(evoke_mapper_create(bad.c_str(), nullptr, &other) == EVOKE_ERR_VALIDATION);
  CHECK(std::string(evoke_last_error()).find("8") != std::string::npos);

  evoke_model* m = nullptr;
  REQUIRE(evoke_model_create("student", nullptr, 3, &m) == EVOKE_OK);
  std::vector<float> window(4 * 9 * 9, 0.0f);
  char* rec = nullptr;
  REQUIRE(evoke_classify_window(m, mp, window.data(), &rec) == EVOKE_OK);
  CHECK(take(rec).find("\"emotion\"") != std::string::npos);
  evoke_model_free(m);
  evoke_mapper_free(mp);
}

TEST_CASE("synth and preprocess through the C boundary") {
  const fs::path raw = scratch("raw"), feats = scratch("feats");
  char* js = nullptr;
  REQUIRE(evoke_synth(raw.string().c_str(), 1, 2, 5, 0.0, &js) == EVOKE_OK);
  take(js);
  REQUIRE(evoke_preprocess(raw.string().c_str(), feats.string().c_str(), 1.0, 3.0, &js) == EVOKE_OK);
  CHECK(take(js).size() > 2);
  CHECK(evoke_preprocess((raw / "nope").string().c_str(), feats.string().c_str(), 1.0, 3.0, &js) !=
        EVOKE_OK);
}

TEST_CASE("bench comparison") {
  const char* reports[] = {
      R"({"model":"a","batch_size":8,"iterations":10,"warmup":1,"workers":1,"mean_ms":2,"median_ms":2,"p95_ms":2,"throughput":4000,"param_count":10,"flops":100,"checkpoint_bytes":1})",
      R"({"model":"b","batch_size":8,"iterations":10,"warmup":1,"workers":1,"mean_ms":4,"median_ms":4,"p95_ms":4,"throughput":2000,"param_count":40,"flops":400,"checkpoint_bytes":1})"};
  char* js = nullptr;
  char* table = nullptr;
  const evoke_status s = evoke_bench_compare(reports, 2, &js, &table);
  INFO(evoke_last_error());
  REQUIRE(s == EVOKE_OK);
  const std::string j = take(js);
  CHECK(j.find("\"a\"") < j.find("\"b\""));
  CHECK(take(table).size() > 0);
  CHECK(evoke_bench_compare(reports, 1, &js, nullptr) == EVOKE_ERR_INVALID_ARGUMENT);
}

TEST_CASE("server start and stop") {
  evoke_model* m = nullptr;
  evoke_mapper* mp = nullptr;
  REQUIRE(evoke_model_create("student", nullptr, 3, &m) == EVOKE_OK);
  REQUIRE(evoke_mapper_create(nullptr, nullptr, &mp) == EVOKE_OK);
  evoke_server* srv = nullptr;
  REQUIRE(evoke_server_start(m, mp, "127.0.0.1:0", 4, &srv) == EVOKE_OK);
  CHECK(evoke_server_port(srv) != 0);
  CHECK(evoke_server_stop(srv) == EVOKE_OK);
  CHECK(evoke_server_stop(srv) == EVOKE_OK);
  evoke_server_free(srv);
  evoke_mapper_free(mp);
  evoke_model_free(m);
}
