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

#include "campusfl/sim/fleet_runner.h"

#include <thread>

namespace campusfl {

std::vector<absl::StatusOr<ClientReport>> RunFleet(
    const std::vector<DeviceProfile>& profiles, const TaskEntry& task,
    const std::string& host, const FleetConfig& config) {
  std::vector<absl::StatusOr<ClientReport>> reports(
      profiles.size(), absl::UnknownError("not run"));
  std::vector<std::thread> threads;
  threads.reserve(profiles.size());
  for (size_t i = 0; i < profiles.size(); ++i) {
    threads.emplace_back([&, i] {
      const std::vector<HealthRecord> records =
          GenerateHealthData(profiles[i], config.days, config);
      ClientOptions options;
      options.host = host;
      options.port = task.port;
      options.session_id = task.task_id;
      reports[i] = RunClient(profiles[i], records, task, options);
    });
  }
  for (std::thread& t : threads) t.join();
  return reports;
}

}  // namespace campusfl
