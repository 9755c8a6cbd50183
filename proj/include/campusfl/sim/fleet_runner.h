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

#ifndef CAMPUSFL_SIM_FLEET_RUNNER_H_
#define CAMPUSFL_SIM_FLEET_RUNNER_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/protocol/message.h"
#include "campusfl/sim/client.h"
#include "campusfl/sim/fleet.h"

namespace campusfl {

// Runs one client thread per profile against `task` and waits for all of
// them. Health data comes from GenerateHealthData(profile, config.days).
// Results are in profile order.
std::vector<absl::StatusOr<ClientReport>> RunFleet(
    const std::vector<DeviceProfile>& profiles, const TaskEntry& task,
    const std::string& host, const FleetConfig& config = DefaultFleetConfig());

}  // namespace campusfl

#endif  // CAMPUSFL_SIM_FLEET_RUNNER_H_
