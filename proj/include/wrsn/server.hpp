#pragma once

// Transports for protocol::Session: a standard-stream loop and a TCP listener
// hosting one independent session per connection.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "wrsn/config.hpp"
#include "wrsn/protocol.hpp"

namespace wrsn::protocol {

inline constexpr std::size_t kMaxLineBytes = 1 << 20;

/// Serve requests from `in` until EOF or "close".
inline void serve_stream(const WorldConfig& config, std::istream& in, std::ostream& out) {
  Session session(config);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << session.handle_line(line) << '\n';
    out.flush();
  }
}

class TcpServer {
 public:
  explicit TcpServer(WorldConfig config) : config_(std::move(config)) {}
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;
  ~TcpServer() {
    stop();
    for (auto& worker : workers_) {
      if (worker.joinable()) worker.join();
    }
  }

  /// Bind to 127.0.0.1:port (0 = ephemeral). Returns the bound port.
  int bind(int port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    int enable = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &enable, sizeof(enable));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
        ::listen(listen_fd_, 16) < 0) {
      const std::string msg = std::strerror(errno);
      ::close(listen_fd_);
      listen_fd_ = -1;
      throw std::runtime_error("bind/listen on port " + std::to_string(port) + ": " + msg);
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
  }

  /// Accept connections until stop(); each connection runs on its own thread.
  void run() {
    while (!stopping_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (stopping_ || errno == EBADF || errno == EINVAL) break;
        if (errno == EINTR) continue;
        break;
      }
      std::lock_guard lock(mutex_);
      workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
  }

  void stop() {
    if (stopping_.exchange(true)) return;
    if (listen_fd_ >= 0) {
      ::shutdown(listen_fd_, SHUT_RDWR);
      ::close(listen_fd_);
    }
  }

 private:
  static bool write_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        return false;
      }
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  void serve_connection(int fd) {
    Session session(config_);
    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open && !session.closed()) {
      const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        break;
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t newline;
      while (open && !session.closed() && (newline = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, newline);
        buffer.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        open = write_all(fd, session.handle_line(line) + "\n");
      }
      if (buffer.size() > kMaxLineBytes) {
        buffer.clear();
        open = write_all(fd, error_response("line too long", "bad_request").dump() + "\n");
      }
    }
    ::close(fd);
  }

  WorldConfig config_;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::mutex mutex_;
  std::vector<std::thread> workers_;
};

}  // namespace wrsn::protocol
