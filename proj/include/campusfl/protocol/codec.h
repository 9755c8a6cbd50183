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

#ifndef CAMPUSFL_PROTOCOL_CODEC_H_
#define CAMPUSFL_PROTOCOL_CODEC_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "campusfl/protocol/message.h"
#include "nlohmann/json.hpp"

namespace campusfl {

// Frame = 4-byte big-endian body length + UTF-8 JSON body.
inline constexpr size_t kFrameHeaderBytes = 4;
inline constexpr size_t kMaxFrame = size_t{16} << 20;

// Prepends the length prefix. Errors: TooLarge.
absl::StatusOr<std::string> FrameBody(std::string_view body);

// Canonical JSON form of a message: sorted keys, no whitespace.
// Errors: SchemaViolation (non-finite numbers, invalid UTF-8).
absl::StatusOr<std::string> EncodeBody(const Message& msg);

// Errors: TooLarge, SchemaViolation.
absl::StatusOr<std::string> EncodeMessage(const Message& msg);

// Decodes a JSON body (no prefix).
// Errors: BadJson, UnsupportedVersion, UnknownType, SchemaViolation.
absl::StatusOr<Message> DecodeBody(std::string_view body);

// Decodes exactly one frame.
// Errors: Truncated, TooLarge, TrailingBytes, plus DecodeBody errors.
absl::StatusOr<Message> DecodeMessage(std::string_view bytes);

// The "payload" member alone, as used by the admin task endpoint.
nlohmann::json PayloadToJson(const Payload& payload);
// Errors: UnknownType, SchemaViolation.
absl::StatusOr<Payload> PayloadFromJson(const std::string& type,
                                        const nlohmann::json& payload);

// Incremental frame splitter for a byte stream.
class FrameReader {
 public:
  void Append(std::string_view bytes) { buffer_.append(bytes); }

  // Next complete message, nullopt if more bytes are needed. A TooLarge
  // prefix is reported as soon as the header arrives.
  absl::StatusOr<std::optional<Message>> Next();

  size_t buffered() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

}  // namespace campusfl

#endif  // CAMPUSFL_PROTOCOL_CODEC_H_
