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

#include "campusfl/base/status.h"

#include <optional>

#include "absl/strings/cord.h"

namespace campusfl {
namespace {
constexpr char kErrorKindUrl[] = "type.campusfl/error_kind";
}  // namespace

absl::Status MakeError(absl::StatusCode code, std::string_view kind,
                       std::string_view detail) {
  std::string message(kind);
  if (!detail.empty()) {
    message.append(": ");
    message.append(detail);
  }
  absl::Status status(code, message);
  status.SetPayload(kErrorKindUrl, absl::Cord(std::string(kind)));
  return status;
}

std::string ErrorKind(const absl::Status& status) {
  auto payload = status.GetPayload(kErrorKindUrl);
  if (!payload.has_value()) return "";
  return std::string(*payload);
}

}  // namespace campusfl
