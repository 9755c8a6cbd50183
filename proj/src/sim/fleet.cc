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

#include "campusfl/sim/fleet.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "campusfl/base/random.h"
#include "campusfl/base/status.h"
#include "campusfl/sim/archetype_defaults.h"
#include "campusfl/trainer/model_trainer.h"

namespace campusfl {
namespace {

using nlohmann::json;

constexpr int kValidationDevices = 30;
constexpr int kActivityHidden = 16;

absl::Status InvalidConfig(const std::string& detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidConfig", detail);
}

NormalParams ReadNormal(const json& doc) {
  return {doc.at("mean").get<double>(), doc.at("sd").get<double>()};
}

double Draw(const NormalParams& p, Rng& rng) {
  std::normal_distribution<double> normal(p.mean, p.sd);
  return std::max(0.0, normal(rng));
}

}  // namespace

std::string_view ArchetypeName(Archetype archetype) {
  switch (archetype) {
    case Archetype::kSedentary:
      return "Sedentary";
    case Archetype::kModerate:
      return "Moderate";
    case Archetype::kActive:
      return "Active";
  }
  return "Sedentary";
}

absl::StatusOr<FleetConfig> FleetConfigFromJson(const json& doc) {
  FleetConfig config;
  try {
    config.days = doc.at("days").get<int>();
    config.label_noise_sd = doc.at("label_noise_sd").get<double>();
    config.clusters = doc.at("clusters").get<std::vector<std::string>>();
    const json& archetypes = doc.at("archetypes");
    for (int a = 0; a < kNumArchetypes; ++a) {
      const std::string name(ArchetypeName(static_cast<Archetype>(a)));
      const json& entry = archetypes.at(name);
      ArchetypeParams& p = config.archetypes[static_cast<size_t>(a)];
      p.steps = ReadNormal(entry.at("steps"));
      p.screen_h = ReadNormal(entry.at("screen_h"));
      p.sleep_h = ReadNormal(entry.at("sleep_h"));
      p.avg_heart_rate = ReadNormal(entry.at("avg_heart_rate"));
      const json& cal = entry.at("calories");
      p.calories_base = cal.at("base").get<double>();
      p.calories_per_step = cal.at("per_step").get<double>();
      p.calories_sd = cal.at("sd").get<double>();
      for (double sd : {p.steps.sd, p.screen_h.sd, p.sleep_h.sd,
                        p.avg_heart_rate.sd, p.calories_sd}) {
        if (!(sd >= 0)) return InvalidConfig(name + ": negative sd");
      }
    }
  } catch (const json::exception& e) {
    return InvalidConfig(e.what());
  }
  if (config.days < 1) return InvalidConfig("days must be >= 1");
  if (config.clusters.empty()) return InvalidConfig("no cluster labels");
  if (!(config.label_noise_sd >= 0)) return InvalidConfig("negative noise");
  return config;
}

const FleetConfig& DefaultFleetConfig() {
  static const FleetConfig* config = [] {
    auto parsed = FleetConfigFromJson(json::parse(kArchetypeDefaultsJson));
    return new FleetConfig(*std::move(parsed));
  }();
  return *config;
}

std::vector<DeviceProfile> GenerateFleet(int n, uint64_t seed,
                                         const FleetConfig& config) {
  std::vector<DeviceProfile> fleet;
  fleet.reserve(static_cast<size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    DeviceProfile p;
    p.client_id = absl::StrFormat("device-%03d", i);
    p.platform = i % 2 == 0 ? Platform::kNameKeyed : Platform::kIndexKeyed;
    p.archetype = static_cast<Archetype>(i % kNumArchetypes);
    p.cluster = config.clusters[static_cast<size_t>(i) % config.clusters.size()];
    p.seed = MixSeed(seed, static_cast<uint64_t>(i));
    fleet.push_back(std::move(p));
  }
  return fleet;
}

double SleepEfficiency(double screen_h, double steps, double sleep_h,
                       double noise) {
  const double raw = 0.85 - 0.03 * screen_h + 0.015 * (steps / 1000) -
                     0.02 * std::abs(sleep_h - 7.5) + noise;
  return std::clamp(raw, 0.0, 1.0);
}

std::vector<HealthRecord> GenerateHealthData(const DeviceProfile& profile,
                                             int days,
                                             const FleetConfig& config) {
  const ArchetypeParams& p =
      config.archetypes[static_cast<size_t>(profile.archetype)];
  Rng rng(MixSeed(profile.seed, "health"));
  std::normal_distribution<double> cal_noise(0.0, p.calories_sd);
  std::normal_distribution<double> label_noise(0.0, config.label_noise_sd);
  std::vector<HealthRecord> records;
  records.reserve(static_cast<size_t>(std::max(days, 0)));
  for (int day = 0; day < days; ++day) {
    HealthRecord r;
    r.day = day;
    r.steps = Draw(p.steps, rng);
    r.screen_h = Draw(p.screen_h, rng);
    r.sleep_h = Draw(p.sleep_h, rng);
    r.avg_heart_rate = Draw(p.avg_heart_rate, rng);
    r.calories = std::max(
        0.0, p.calories_base + p.calories_per_step * r.steps + cal_noise(rng));
    r.sleep_efficiency =
        SleepEfficiency(r.screen_h, r.steps, r.sleep_h, label_noise(rng));
    records.push_back(r);
  }
  return records;
}

absl::StatusOr<double> LocalStatistic(const std::vector<HealthRecord>& records,
                                      std::string_view attribute) {
  double HealthRecord::*field = nullptr;
  if (attribute == "steps") {
    field = &HealthRecord::steps;
  } else if (attribute == "calories") {
    field = &HealthRecord::calories;
  } else if (attribute == "avg_heart_rate") {
    field = &HealthRecord::avg_heart_rate;
  } else if (attribute == "sleep_h") {
    field = &HealthRecord::sleep_h;
  } else if (attribute == "screen_h") {
    field = &HealthRecord::screen_h;
  } else if (attribute == "sleep_efficiency") {
    field = &HealthRecord::sleep_efficiency;
  } else {
    return MakeError(absl::StatusCode::kInvalidArgument, "UnknownAttribute",
                     std::string(attribute));
  }
  if (records.empty()) {
    return MakeError(absl::StatusCode::kInvalidArgument, "EmptyInput",
                     "no records");
  }
  double sum = 0;
  for (const HealthRecord& r : records) sum += r.*field;
  return sum / static_cast<double>(records.size());
}

std::string_view WorkloadName(Workload workload) {
  return workload == Workload::kSleep ? "sleep" : "activity";
}

absl::StatusOr<Workload> ParseWorkload(std::string_view name) {
  if (name == "sleep") return Workload::kSleep;
  if (name == "activity") return Workload::kActivity;
  return MakeError(absl::StatusCode::kInvalidArgument, "UnknownWorkload",
                   std::string(name));
}

Dataset BuildDataset(Workload workload,
                     const std::vector<HealthRecord>& records,
                     Archetype archetype) {
  Dataset data;
  data.kind = workload == Workload::kSleep ? TaskKind::kRegression
                                           : TaskKind::kClassification;
  data.features = Matrix(0, 3);
  for (const HealthRecord& r : records) {
    const double steps_k = r.steps / 1000;
    if (workload == Workload::kSleep) {
      const double row[] = {(r.screen_h - 5) / 2.5, (steps_k - 8) / 4,
                            (std::abs(r.sleep_h - 7.5) - 0.8) / 0.7};
      data.features.AppendRow(row);
      data.labels.push_back(r.sleep_efficiency);
    } else {
      const double row[] = {(r.avg_heart_rate - 72) / 6, (steps_k - 8) / 4,
                            (r.calories / 1000 - 2.1) / 0.3};
      data.features.AppendRow(row);
      data.labels.push_back(static_cast<double>(archetype));
    }
  }
  return data;
}

ModelSpec WorkloadModelSpec(Workload workload, const std::string& model_id,
                            int64_t version) {
  if (workload == Workload::kSleep) {
    return ModelSpec::Build(model_id, version, Architecture::Linear(),
                            {{"w", {3}}, {"b", {1}}});
  }
  return ModelSpec::Build(model_id, version, Architecture::Mlp(kActivityHidden),
                          {{"w1", {3, kActivityHidden}},
                           {"b1", {kActivityHidden}},
                           {"w2", {kActivityHidden, kNumArchetypes}},
                           {"b2", {kNumArchetypes}}});
}

CanonicalModel WorkloadInitialModel(Workload workload,
                                    const std::string& model_id,
                                    uint64_t seed) {
  ModelSpec spec = WorkloadModelSpec(workload, model_id, 1);
  auto trainer = ModelTrainer::Create(spec, seed);
  return {spec, trainer->GetParameters()};
}

Dataset ValidationSplit(Workload workload, uint64_t seed,
                        const FleetConfig& config) {
  Dataset split;
  split.kind = workload == Workload::kSleep ? TaskKind::kRegression
                                            : TaskKind::kClassification;
  split.features = Matrix(0, 3);
  for (const DeviceProfile& p :
       GenerateFleet(kValidationDevices, MixSeed(seed, "validation"), config)) {
    split.Append(
        BuildDataset(workload, GenerateHealthData(p, config.days, config),
                     p.archetype));
  }
  return split;
}

}  // namespace campusfl
