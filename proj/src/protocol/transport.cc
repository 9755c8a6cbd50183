// Copyright 2026 The CampusFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "campusfl/protocol/transport.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

using SteadyClock = std::chrono::steady_clock;

absl::Status Closed(std::string_view detail) {
  return MakeError(absl::StatusCode::kUnavailable, "ConnectionClosed", detail);
}

absl::Status Timeout(std::string_view detail) {
  return MakeError(absl::StatusCode::kDeadlineExceeded, "Timeout", detail);
}

int RemainingMs(SteadyClock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - SteadyClock::now());
  return left.count() < 0 ? 0 : static_cast<int>(left.count());
}

// Waits for `events` on fd. Returns false on timeout.
absl::StatusOr<bool> WaitFor(int fd, short events,
                             SteadyClock::time_point deadline) {
  while (true) {
    pollfd p{fd, events, 0};
    const int rc = ::poll(&p, 1, RemainingMs(deadline));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) return Closed(std::strerror(errno));
  }
}

void SetNoDelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

std::string PeerName(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getpeername(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    return "?";
  }
  char buf[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
  return absl::StrCat(buf, ":", ntohs(addr.sin_port));
}

absl::StatusOr<sockaddr_in> Resolve(const std::string& host, int port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  const std::string name = host == "localhost" ? "127.0.0.1" : host;
  if (::inet_pton(AF_INET, name.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &found) != 0 || !found) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidAddress",
                     host);
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  ::freeaddrinfo(found);
  return addr;
}

}  // namespace

UniqueFd& UniqueFd::operator=(UniqueFd&& other) noexcept {
  if (this != &other) reset(other.release());
  return *this;
}

int UniqueFd::release() {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

void UniqueFd::reset(int fd) {
  if (fd_ >= 0) ::close(fd_);
  fd_ = fd;
}

Connection::Connection(UniqueFd fd) : fd_(std::move(fd)) {
  SetNoDelay(fd_.get());
  peer_ = PeerName(fd_.get());
}

absl::Status Connection::Send(const Message& msg, int timeout_ms) {
  CAMPUSFL_ASSIGN_OR_RETURN(std::string frame, EncodeMessage(msg));
  const auto deadline =
      SteadyClock::now() + std::chrono::milliseconds(timeout_ms);
  size_t sent = 0;
  while (sent < frame.size()) {
    const ssize_t n = ::send(fd_.get(), frame.data() + sent,
                             frame.size() - sent, MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n > 0) {
      sent += static_cast<size_t>(n);
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      CAMPUSFL_ASSIGN_OR_RETURN(bool ready,
                                WaitFor(fd_.get(), POLLOUT, deadline));
      if (!ready) return Timeout("send");
      continue;
    }
    return Closed(n < 0 ? std::strerror(errno) : "send returned 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<Message> Connection::Receive(int timeout_ms) {
  const auto deadline =
      SteadyClock::now() + std::chrono::milliseconds(timeout_ms);
  char buf[64 * 1024];
  while (true) {
    CAMPUSFL_ASSIGN_OR_RETURN(std::optional<Message> msg, reader_.Next());
    if (msg.has_value()) return *std::move(msg);
    CAMPUSFL_ASSIGN_OR_RETURN(bool ready, WaitFor(fd_.get(), POLLIN, deadline));
    if (!ready) return Timeout("receive");
    const ssize_t n = ::recv(fd_.get(), buf, sizeof(buf), MSG_DONTWAIT);
    if (n > 0) {
      reader_.Append(std::string_view(buf, static_cast<size_t>(n)));
    } else if (n == 0) {
      return Closed(reader_.buffered() > 0 ? "peer closed mid-frame"
                                           : "peer closed");
    } else if (errno != EINTR && errno != EAGAIN && errno != EWOULDBLOCK) {
      return Closed(std::strerror(errno));
    }
  }
}

void Connection::Shutdown() { ::shutdown(fd_.get(), SHUT_RDWR); }

absl::StatusOr<std::unique_ptr<Connection>> Connect(const std::string& host,
                                                    int port, int timeout_ms) {
  CAMPUSFL_ASSIGN_OR_RETURN(sockaddr_in addr, Resolve(host, port));
  UniqueFd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC | SOCK_NONBLOCK, 0));
  if (!fd.valid()) return Closed(std::strerror(errno));
  const auto deadline =
      SteadyClock::now() + std::chrono::milliseconds(timeout_ms);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) !=
      0) {
    if (errno != EINPROGRESS) {
      return Closed(absl::StrCat("connect ", host, ":", port, ": ",
                                 std::strerror(errno)));
    }
    CAMPUSFL_ASSIGN_OR_RETURN(bool ready, WaitFor(fd.get(), POLLOUT, deadline));
    if (!ready) return Timeout(absl::StrCat("connect ", host, ":", port));
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      return Closed(absl::StrCat("connect ", host, ":", port, ": ",
                                 std::strerror(err)));
    }
  }
  return std::make_unique<Connection>(std::move(fd));
}

absl::StatusOr<std::unique_ptr<Listener>> Listener::Bind(
    const std::string& host, int port) {
  auto addr = Resolve(host, port);
  if (!addr.ok()) return addr.status();
  UniqueFd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC | SOCK_NONBLOCK, 0));
  if (!fd.valid()) {
    return MakeError(absl::StatusCode::kUnavailable, "BindFailed",
                     std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&*addr), sizeof(*addr)) !=
          0 ||
      ::listen(fd.get(), 256) != 0) {
    return MakeError(absl::StatusCode::kUnavailable, "BindFailed",
                     absl::StrCat(host, ":", port, ": ", std::strerror(errno)));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&bound), &len);
  return std::unique_ptr<Listener>(
      new Listener(std::move(fd), ntohs(bound.sin_port)));
}

absl::StatusOr<std::unique_ptr<Connection>> Listener::Accept(int timeout_ms) {
  if (shut_down_) return std::unique_ptr<Connection>();
  const auto deadline =
      SteadyClock::now() + std::chrono::milliseconds(timeout_ms);
  CAMPUSFL_ASSIGN_OR_RETURN(bool ready, WaitFor(fd_.get(), POLLIN, deadline));
  if (!ready || shut_down_) return std::unique_ptr<Connection>();
  const int client = ::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC);
  if (client < 0) {
    if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR ||
        errno == ECONNABORTED) {
      return std::unique_ptr<Connection>();
    }
    return Closed(std::strerror(errno));
  }
  return std::make_unique<Connection>(UniqueFd(client));
}

void Listener::Shutdown() {
  shut_down_ = true;
  ::shutdown(fd_.get(), SHUT_RDWR);
}

absl::StatusOr<std::pair<std::string, int>> ParseHostPort(
    const std::string& address) {
  const size_t colon = address.rfind(':');
  int port = 0;
  if (colon == std::string::npos || colon == 0 ||
      !absl::SimpleAtoi(address.substr(colon + 1), &port) || port <= 0 ||
      port > 65535) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidAddress",
                     absl::StrCat("expected HOST:PORT, got '", address, "'"));
  }
  return std::make_pair(address.substr(0, colon), port);
}

}  // namespace campusfl
