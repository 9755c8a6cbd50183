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

#ifndef CAMPUSFL_BASE_CLOCK_H_
#define CAMPUSFL_BASE_CLOCK_H_

#include <atomic>
#include <cstdint>

namespace campusfl {

// Source of the timestamps written to persisted records.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual int64_t NowMillis() = 0;
};

// Wall-clock milliseconds since the Unix epoch.
class SystemClock : public Clock {
 public:
  int64_t NowMillis() override;
};

// Deterministic clock: each reading returns the next integer tick. Used by
// seeded demo runs so that persisted output is reproducible byte for byte.
class LogicalClock : public Clock {
 public:
  int64_t NowMillis() override { return ++ticks_; }

 private:
  std::atomic<int64_t> ticks_{0};
};

}  // namespace campusfl

#endif  // CAMPUSFL_BASE_CLOCK_H_
