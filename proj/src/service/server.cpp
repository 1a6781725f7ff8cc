#include "service/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <vector>

namespace evoke::service {

namespace {

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

ListenAddress parse_listen_address(const std::string& text) {
  ListenAddress a;
  std::string port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) a.host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const unsigned long p = std::stoul(port_text, &used);
    require(used == port_text.size() && p <= 65535, ErrorCode::InvalidArgument, "bad port");
    a.port = static_cast<std::uint16_t>(p);
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "invalid listen address '" + text + "'");
  }
  if (a.host == "localhost") a.host = "127.0.0.1";
  return a;
}

Server::Server(ServiceContext ctx, ListenAddress address, std::size_t max_connections)
    : ctx_(ctx), address_(std::move(address)), max_connections_(max_connections) {
  require(ctx_.model && ctx_.table && ctx_.manifest, ErrorCode::InvalidArgument,
          "server needs a model, emotion table and avatar manifest");
}

Server::~Server() { stop(); }

void Server::start() {
  require(!running_, ErrorCode::Contract, "server already running");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(address_.port);
  require(::inet_pton(AF_INET, address_.host.c_str(), &addr.sin_addr) == 1, ErrorCode::Network,
          "cannot parse IPv4 address '" + address_.host + "'");

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  require(listen_fd_ >= 0, ErrorCode::Network, std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    fail(ErrorCode::Network, "cannot bind " + address_.host + ":" +
                                 std::to_string(address_.port) + ": " + why);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  bound_port_ = ntohs(addr.sin_port);
  stopping_ = false;
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::accept_loop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    reap_finished();
    if (ready <= 0 || !(p.revents & POLLIN)) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    std::lock_guard lock(mutex_);
    if (connections_.size() >= max_connections_) {
      send_all(fd, error_line(std::nullopt, "busy") + "\n");
      ::close(fd);
      continue;
    }
    auto conn = std::make_unique<Connection>();
    conn->fd = fd;
    Connection& ref = *conn;
    connections_.push_back(std::move(conn));
    ref.worker = std::thread([this, &ref] { serve_connection(ref); });
  }
}

void Server::serve_connection(Connection& conn) {
  std::string buffer;
  std::vector<char> chunk(64 * 1024);
  bool discarding = false;  // inside an over-long line
  bool open = true;
  while (open) {
    const ssize_t n = ::recv(conn.fd, chunk.data(), chunk.size(), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk.data(), static_cast<std::size_t>(n));

    std::string out;
    std::size_t start = 0;
    for (;;) {
      const std::size_t nl = buffer.find('\n', start);
      if (nl == std::string::npos) break;
      if (discarding) {
        discarding = false;
      } else {
        std::string_view line(buffer.data() + start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) {
          out += handle_request_line(line, ctx_);
          out += '\n';
        }
      }
      start = nl + 1;
    }
    buffer.erase(0, start);
    if (buffer.size() > kMaxLineBytes) {
      if (!discarding) {
        out += error_line(std::nullopt, kErrTooLarge);
        out += '\n';
      }
      discarding = true;
      buffer.clear();
    }
    if (!out.empty() && !send_all(conn.fd, out)) open = false;
  }
  ::shutdown(conn.fd, SHUT_RDWR);
  conn.done = true;
}

void Server::reap_finished() {
  std::lock_guard lock(mutex_);
  for (auto it = connections_.begin(); it != connections_.end();) {
    if ((*it)->done) {
      (*it)->worker.join();
      ::close((*it)->fd);
      it = connections_.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::stop() {
  if (!running_.exchange(false)) return;
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
  {
    std::lock_guard lock(mutex_);
    // Lines already received are answered before the worker sees EOF.
    for (auto& c : connections_) ::shutdown(c->fd, SHUT_RD);
  }
  for (auto& c : connections_) {
    if (c->worker.joinable()) c->worker.join();
    ::close(c->fd);
  }
  connections_.clear();
}

}  // namespace evoke::service
