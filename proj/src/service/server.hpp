#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "service/protocol.hpp"

namespace evoke::service {

struct ListenAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Accepts "host:port", ":port" or "port".
ListenAddress parse_listen_address(const std::string& text);

/// Newline-delimited JSON over TCP. One acceptor thread plus one worker per
/// connection; each connection answers its lines strictly in order.
class Server {
 public:
  Server(ServiceContext ctx, ListenAddress address, std::size_t max_connections = 64);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Throws ErrorCode::Network on bind failure.
  void start();
  std::uint16_t port() const { return bound_port_; }
  /// Stops accepting, lets every connection finish the lines it already
  /// received, then joins all threads.
  void stop();
  bool running() const { return running_.load(); }

 private:
  struct Connection {
    int fd = -1;
    std::thread worker;
    std::atomic<bool> done{false};
  };

  void accept_loop();
  void serve_connection(Connection& conn);
  void reap_finished();

  ServiceContext ctx_;
  ListenAddress address_;
  std::size_t max_connections_;
  int listen_fd_ = -1;
  std::uint16_t bound_port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<std::unique_ptr<Connection>> connections_;
};

}  // namespace evoke::service
