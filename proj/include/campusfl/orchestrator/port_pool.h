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

#ifndef CAMPUSFL_ORCHESTRATOR_PORT_POOL_H_
#define CAMPUSFL_ORCHESTRATOR_PORT_POOL_H_

#include <functional>
#include <set>

#include "absl/status/statusor.h"

namespace campusfl {

// Session ports [base, base + size). Not internally synchronized.
class PortPool {
 public:
  PortPool(int base, int size) : base_(base), size_(size) {}

  // Lowest free port for which `claim` succeeds; ports whose claim fails
  // (e.g. taken by another process) are skipped, not reserved.
  // Errors: PortPoolExhausted.
  absl::StatusOr<int> Acquire(const std::function<bool(int)>& claim);

  void Release(int port) { in_use_.erase(port); }

  bool InUse(int port) const { return in_use_.count(port) > 0; }
  size_t in_use() const { return in_use_.size(); }
  int base() const { return base_; }
  int size() const { return size_; }

 private:
  int base_;
  int size_;
  std::set<int> in_use_;
};

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_PORT_POOL_H_
