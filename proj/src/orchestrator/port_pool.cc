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

#include "campusfl/orchestrator/port_pool.h"

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {

absl::StatusOr<int> PortPool::Acquire(const std::function<bool(int)>& claim) {
  for (int port = base_; port < base_ + size_; ++port) {
    if (in_use_.count(port)) continue;
    if (!claim(port)) continue;
    in_use_.insert(port);
    return port;
  }
  return MakeError(absl::StatusCode::kResourceExhausted, "PortPoolExhausted",
                   absl::StrCat("no free port in [", base_, ", ",
                                base_ + size_, ")"));
}

}  // namespace campusfl
