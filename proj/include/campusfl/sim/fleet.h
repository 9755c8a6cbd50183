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

#ifndef CAMPUSFL_SIM_FLEET_H_
#define CAMPUSFL_SIM_FLEET_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/model/canonical_model.h"
#include "campusfl/model/platform_encoding.h"
#include "campusfl/trainer/dataset.h"
#include "nlohmann/json.hpp"

namespace campusfl {

enum class Archetype { kSedentary, kModerate, kActive };
inline constexpr int kNumArchetypes = 3;

std::string_view ArchetypeName(Archetype archetype);

struct NormalParams {
  double mean = 0;
  double sd = 0;
};

struct ArchetypeParams {
  NormalParams steps;
  NormalParams screen_h;
  NormalParams sleep_h;
  NormalParams avg_heart_rate;
  // calories = base + per_step * steps + N(0, sd)
  double calories_base = 0;
  double calories_per_step = 0;
  double calories_sd = 0;
};

struct FleetConfig {
  int days = 30;
  double label_noise_sd = 0.02;
  std::vector<std::string> clusters;
  std::array<ArchetypeParams, kNumArchetypes> archetypes;
};

// The checked-in defaults (config/archetypes.json), compiled in.
const FleetConfig& DefaultFleetConfig();

// Errors: InvalidConfig.
absl::StatusOr<FleetConfig> FleetConfigFromJson(const nlohmann::json& doc);

struct DeviceProfile {
  std::string client_id;
  Platform platform = Platform::kNameKeyed;
  Archetype archetype = Archetype::kSedentary;
  std::string cluster;
  uint64_t seed = 0;
};

// Archetypes round-robin, platforms alternate, clusters cycle through the
// configured labels. Deterministic in `seed`.
std::vector<DeviceProfile> GenerateFleet(
    int n, uint64_t seed, const FleetConfig& config = DefaultFleetConfig());

struct HealthRecord {
  int day = 0;
  double avg_heart_rate = 0;
  double steps = 0;
  double calories = 0;
  double sleep_h = 0;
  double screen_h = 0;
  double sleep_efficiency = 0;
};

// Synthetic ground truth for the sleep task.
double SleepEfficiency(double screen_h, double steps, double sleep_h,
                       double noise);

std::vector<HealthRecord> GenerateHealthData(
    const DeviceProfile& profile, int days,
    const FleetConfig& config = DefaultFleetConfig());

// Mean of a named attribute over the records, the client-side statistic
// for analytics queries. Errors: UnknownAttribute, EmptyInput.
absl::StatusOr<double> LocalStatistic(const std::vector<HealthRecord>& records,
                                      std::string_view attribute);

// Learning tasks the fleet can serve.
enum class Workload { kSleep, kActivity };

std::string_view WorkloadName(Workload workload);
// Errors: UnknownWorkload.
absl::StatusOr<Workload> ParseWorkload(std::string_view name);

// sleep: [screen_h, steps/1000, |sleep_h - 7.5|] -> sleep efficiency.
// activity: [heart rate, steps/1000, calories/1000] -> archetype index.
// Features are standardized with fixed constants.
Dataset BuildDataset(Workload workload,
                     const std::vector<HealthRecord>& records,
                     Archetype archetype);

// Layer layout the workload trains: Linear for sleep, Mlp{16} for activity.
ModelSpec WorkloadModelSpec(Workload workload, const std::string& model_id,
                            int64_t version);

// A zero/small-init model for the workload, ready to register.
CanonicalModel WorkloadInitialModel(Workload workload,
                                    const std::string& model_id,
                                    uint64_t seed);

// Server-held validation split: 30 devices on a salt of `seed` that no
// client fleet uses.
Dataset ValidationSplit(Workload workload, uint64_t seed,
                        const FleetConfig& config = DefaultFleetConfig());

}  // namespace campusfl

#endif  // CAMPUSFL_SIM_FLEET_H_
