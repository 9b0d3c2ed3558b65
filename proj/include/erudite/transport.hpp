#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "erudite/errors.hpp"

namespace erudite::net {

using millis = std::chrono::milliseconds;

// Bidirectional line-oriented channel endpoint. recv_line returns nullopt on
// timeout and throws io_error once the peer is gone and the backlog drained.
class MessageLink {
 public:
  virtual ~MessageLink() = default;
  virtual void send_line(const std::string& line) = 0;
  virtual std::optional<std::string> recv_line(millis timeout) = 0;
  virtual void close() = 0;
};

// --- In-process transport ----------------------------------------------------

namespace detail {

struct LineQueue {
  std::mutex m;
  std::condition_variable cv;
  std::deque<std::pair<std::chrono::steady_clock::time_point, std::string>> items;
  bool closed = false;

  void push(std::string line, millis delay) {
    {
      std::lock_guard<std::mutex> lock(m);
      if (closed) throw io_error("in-process link: peer closed");
      items.emplace_back(std::chrono::steady_clock::now() + delay, std::move(line));
    }
    cv.notify_all();
  }

  std::optional<std::string> pop(millis timeout) {
    std::unique_lock<std::mutex> lock(m);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      if (!items.empty() && items.front().first <= now) {
        std::string line = std::move(items.front().second);
        items.pop_front();
        return line;
      }
      if (items.empty() && closed) throw io_error("in-process link: closed");
      if (now >= deadline) return std::nullopt;
      auto wake = deadline;
      if (!items.empty()) wake = std::min(wake, items.front().first);
      cv.wait_until(lock, wake);
    }
  }

  void close_side() {
    {
      std::lock_guard<std::mutex> lock(m);
      closed = true;
    }
    cv.notify_all();
  }
};

}  // namespace detail

// One endpoint of an in-memory duplex pipe; a one-way delivery latency can be
// injected on each direction to model the transfer hop.
class InProcessLink : public MessageLink {
 public:
  InProcessLink(std::shared_ptr<detail::LineQueue> tx, std::shared_ptr<detail::LineQueue> rx,
                millis latency)
      : tx_(std::move(tx)), rx_(std::move(rx)), latency_(latency) {}

  ~InProcessLink() override { close(); }

  void send_line(const std::string& line) override { tx_->push(line, latency_); }

  std::optional<std::string> recv_line(millis timeout) override { return rx_->pop(timeout); }

  void close() override {
    tx_->close_side();
    rx_->close_side();
  }

 private:
  std::shared_ptr<detail::LineQueue> tx_;
  std::shared_ptr<detail::LineQueue> rx_;
  millis latency_;
};

inline std::pair<std::unique_ptr<MessageLink>, std::unique_ptr<MessageLink>> make_link_pair(
    millis latency = millis{0}) {
  auto a_to_b = std::make_shared<detail::LineQueue>();
  auto b_to_a = std::make_shared<detail::LineQueue>();
  return {std::make_unique<InProcessLink>(a_to_b, b_to_a, latency),
          std::make_unique<InProcessLink>(b_to_a, a_to_b, latency)};
}

// --- TCP transport -----------------------------------------------------------

class TcpConnection : public MessageLink {
 public:
  explicit TcpConnection(int fd) : fd_(fd) {}
  TcpConnection(const TcpConnection&) = delete;
  TcpConnection& operator=(const TcpConnection&) = delete;
  ~TcpConnection() override { close(); }

  void send_line(const std::string& line) override {
    std::size_t sent = 0;
    while (sent < line.size()) {
      const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw io_error(std::string("tcp send: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> recv_line(millis timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl + 1);
        buffer_.erase(0, nl + 1);
        return line;
      }
      if (eof_) {
        if (buffer_.empty()) throw io_error("tcp recv: connection closed");
        std::string line = std::move(buffer_);
        buffer_.clear();
        return line;
      }
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) return std::nullopt;
      const auto remain = std::chrono::duration_cast<millis>(deadline - now);
      pollfd pfd{fd_, POLLIN, 0};
      const int pr = ::poll(&pfd, 1, static_cast<int>(remain.count()) + 1);
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw io_error(std::string("tcp poll: ") + std::strerror(errno));
      }
      if (pr == 0) return std::nullopt;
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw io_error(std::string("tcp recv: ") + std::strerror(errno));
      }
      if (n == 0) {
        eof_ = true;
        continue;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
  std::string buffer_;
  bool eof_ = false;
};

class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw io_error(std::string("tcp socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      const std::string err = std::strerror(errno);
      ::close(fd_);
      fd_ = -1;
      throw io_error("tcp bind: " + err);
    }
    if (::listen(fd_, 16) != 0) {
      const std::string err = std::strerror(errno);
      ::close(fd_);
      fd_ = -1;
      throw io_error("tcp listen: " + err);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener() { close(); }

  std::uint16_t port() const { return port_; }

  // Accept one connection; nullptr on timeout or once the listener is closed.
  std::unique_ptr<TcpConnection> accept(millis timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (pr <= 0) return nullptr;
    const int cfd = ::accept(fd_, nullptr, nullptr);
    if (cfd < 0) return nullptr;
    const int one = 1;
    ::setsockopt(cfd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<TcpConnection>(cfd);
  }

  void close() {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

inline std::unique_ptr<MessageLink> tcp_connect(const std::string& host, std::uint16_t port,
                                                int attempts = 10,
                                                millis backoff = millis{100}) {
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw io_error(std::string("tcp socket: ") + std::strerror(errno));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      ::close(fd);
      throw io_error("tcp connect: bad address '" + host + "'");
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<TcpConnection>(fd);
    }
    ::close(fd);
    std::this_thread::sleep_for(backoff);
  }
  throw io_error("tcp connect: " + host + ":" + std::to_string(port) + " unreachable");
}

// Adds a fixed one-way delay in front of every send, modelling the transfer
// hop of the deployment (wireless link, default 16 ms).
class DelayedLink : public MessageLink {
 public:
  DelayedLink(std::unique_ptr<MessageLink> inner, millis delay)
      : inner_(std::move(inner)), delay_(delay) {}

  void send_line(const std::string& line) override {
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    inner_->send_line(line);
  }

  std::optional<std::string> recv_line(millis timeout) override { return inner_->recv_line(timeout); }

  void close() override { inner_->close(); }

 private:
  std::unique_ptr<MessageLink> inner_;
  millis delay_;
};

}  // namespace erudite::net
