#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "doctest.h"
#include "service/server.hpp"

using namespace evoke;
using namespace evoke::service;

namespace {

struct Fixture {
  nn::Model model;
  mapping::EmotionTable table = mapping::EmotionTable::defaults();
  mapping::AvatarManifest manifest = mapping::AvatarManifest::defaults(table);
  ServiceContext ctx() const { return {&model, &table, &manifest}; }

  Fixture() : model([] {
    Prng p(1);
    return nn::build_student({}, p);
  }()) {}
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Json window_json(float fill) {
  Json w = Json::array();
  for (int c = 0; c < 4; ++c) {
    Json plane = Json::array();
    for (int r = 0; r < 9; ++r) plane.push_back(std::vector<float>(9, fill));
    w.push_back(plane);
  }
  return w;
}

std::string request(const std::string& id, float fill = 0.1f) {
  return Json{{"id", id}, {"window", window_json(fill)}}.dump();
}

int connect_to(std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
  return fd;
}

void send_text(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    const ssize_t n = ::send(fd, s.data() + off, s.size() - off, MSG_NOSIGNAL);
    REQUIRE(n > 0);
    off += static_cast<std::size_t>(n);
  }
}

// Reads until `count` lines or EOF.
std::vector<std::string> read_lines(int fd, std::size_t count) {
  std::vector<std::string> lines;
  std::string buf;
  char chunk[65536];
  while (lines.size() < count) {
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buf.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    while ((pos = buf.find('\n')) != std::string::npos) {
      lines.push_back(buf.substr(0, pos));
      buf.erase(0, pos + 1);
    }
  }
  return lines;
}

}  // namespace

TEST_CASE("request handler responses") {
  const auto ctx = fixture().ctx();
  const Json ok = Json::parse(handle_request_line(request("a"), ctx));
  CHECK(ok.at("id") == "a");
  CHECK(ok.at("probs").size() == 3);
  CHECK(ok.at("bits").size() == 3);
  CHECK(ok.contains("emotion"));
  CHECK(ok.contains("avatar"));
  CHECK(ok.at("latency_ms").get<double>() >= 0.0);

  CHECK(Json::parse(handle_request_line("not json", ctx)) == Json{{"error", "parse"}});
  CHECK(Json::parse(handle_request_line("[1,2]", ctx)).at("error") == "schema");
  CHECK(Json::parse(handle_request_line(R"({"id":5,"window":[]})", ctx)).at("error") == "schema");
  CHECK(Json::parse(handle_request_line(R"({"id":"x"})", ctx)) == Json{{"id", "x"}, {"error", "schema"}});

  Json bad = Json{{"id", "b"}, {"window", window_json(0)}};
  bad["window"][2][3].erase(0);
  CHECK(Json::parse(handle_request_line(bad.dump(), ctx)) == Json{{"id", "b"}, {"error", "shape"}});
  bad = Json{{"id", "c"}, {"window", window_json(0)}};
  bad["window"][0][0][0] = "nan";
  CHECK(Json::parse(handle_request_line(bad.dump(), ctx)).at("error") == "shape");

  CHECK(Json::parse(handle_request_line(std::string(kMaxLineBytes + 1, ' '), ctx)).at("error") ==
        "too_large");
}

TEST_CASE("listen address parsing") {
  CHECK(parse_listen_address("127.0.0.1:9000").port == 9000);
  CHECK(parse_listen_address(":81").host == "127.0.0.1");
  CHECK(parse_listen_address("localhost:0").host == "127.0.0.1");
  CHECK(parse_listen_address("7878").port == 7878);
  CHECK_THROWS_AS(parse_listen_address("host:notaport"), Error);
  CHECK_THROWS_AS(parse_listen_address("h:70000"), Error);
}

TEST_CASE("server answers pipelined requests in order and survives bad lines") {
  Server server(fixture().ctx(), {"127.0.0.1", 0});
  server.start();
  REQUIRE(server.port() != 0);
  const int fd = connect_to(server.port());

  const std::size_t n = 200;
  std::thread writer([&] {
    std::string batch;
    for (std::size_t i = 0; i < n; ++i) {
      batch += request("r" + std::to_string(i)) + "\n";
      if (i == n / 2) batch += "{oops\r\n\n";
    }
    send_text(fd, batch);
  });
  const auto lines = read_lines(fd, n + 1);
  writer.join();
  REQUIRE(lines.size() == n + 1);
  std::size_t next = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Json j = Json::parse(lines[i]);
    if (i == n / 2 + 1) {
      CHECK(j == Json{{"error", "parse"}});
      continue;
    }
    CHECK(j.at("id") == "r" + std::to_string(next++));
  }

  // an over-long line is rejected and the connection keeps working
  send_text(fd, std::string(kMaxLineBytes + 10, 'x') + "\n" + request("after") + "\n");
  const auto more = read_lines(fd, 2);
  REQUIRE(more.size() == 2);
  CHECK(Json::parse(more[0]).at("error") == "too_large");
  CHECK(Json::parse(more[1]).at("id") == "after");

  ::close(fd);
  server.stop();
  CHECK_FALSE(server.running());
}

TEST_CASE("graceful stop finishes in-flight lines and closes connections") {
  Server server(fixture().ctx(), {"127.0.0.1", 0});
  server.start();
  const int fd = connect_to(server.port());
  send_text(fd, request("last") + "\n");
  const auto first = read_lines(fd, 1);
  REQUIRE(first.size() == 1);
  server.stop();
  // after stop the peer sees EOF
  char c;
  CHECK(::recv(fd, &c, 1, 0) == 0);
  ::close(fd);

  Server twice(fixture().ctx(), {"127.0.0.1", 0});
  twice.start();
  Server clash(fixture().ctx(), {"127.0.0.1", twice.port()});
  CHECK_THROWS_AS(clash.start(), Error);
  twice.stop();
}

TEST_CASE("connection limit answers busy") {
  Server server(fixture().ctx(), {"127.0.0.1", 0}, 1);
  server.start();
  const int a = connect_to(server.port());
  send_text(a, request("hold") + "\n");
  REQUIRE(read_lines(a, 1).size() == 1);
  const int b = connect_to(server.port());
  const auto busy = read_lines(b, 1);
  REQUIRE(busy.size() == 1);
  CHECK(Json::parse(busy[0]).at("error") == "busy");
  ::close(a);
  ::close(b);
  server.stop();
}
