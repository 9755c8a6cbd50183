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

#ifndef CAMPUSFL_PROTOCOL_TRANSPORT_H_
#define CAMPUSFL_PROTOCOL_TRANSPORT_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "campusfl/protocol/codec.h"

namespace campusfl {

// Owns a file descriptor.
class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  UniqueFd(UniqueFd&& other) noexcept : fd_(other.release()) {}
  UniqueFd& operator=(UniqueFd&& other) noexcept;
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;
  ~UniqueFd() { reset(); }

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release();
  void reset(int fd = -1);

 private:
  int fd_ = -1;
};

// A framed, bidirectional message stream over TCP. Send and Receive may be
// called from different threads; Shutdown may be called from any thread and
// wakes blocked calls.
//
// Errors: Timeout (DeadlineExceeded), ConnectionClosed (Unavailable), plus
// codec errors for malformed frames.
class Connection {
 public:
  explicit Connection(UniqueFd fd);

  absl::Status Send(const Message& msg, int timeout_ms = 10000);
  absl::StatusOr<Message> Receive(int timeout_ms);

  void Shutdown();
  std::string peer() const { return peer_; }

 private:
  UniqueFd fd_;
  FrameReader reader_;
  std::string peer_;
};

absl::StatusOr<std::unique_ptr<Connection>> Connect(const std::string& host,
                                                    int port, int timeout_ms);

class Listener {
 public:
  // Port 0 picks an ephemeral port. Errors: BindFailed.
  static absl::StatusOr<std::unique_ptr<Listener>> Bind(
      const std::string& host, int port);

  int port() const { return port_; }

  // nullptr on timeout or after Shutdown.
  absl::StatusOr<std::unique_ptr<Connection>> Accept(int timeout_ms);

  void Shutdown();

 private:
  Listener(UniqueFd fd, int port) : fd_(std::move(fd)), port_(port) {}

  UniqueFd fd_;
  int port_;
  std::atomic<bool> shut_down_{false};
};

// Splits "host:port". Errors: InvalidAddress.
absl::StatusOr<std::pair<std::string, int>> ParseHostPort(
    const std::string& address);

}  // namespace campusfl

#endif  // CAMPUSFL_PROTOCOL_TRANSPORT_H_
