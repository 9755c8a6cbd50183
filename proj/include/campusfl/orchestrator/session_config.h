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

#ifndef CAMPUSFL_ORCHESTRATOR_SESSION_CONFIG_H_
#define CAMPUSFL_ORCHESTRATOR_SESSION_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "campusfl/aggregation/dp.h"
#include "campusfl/analytics/fa_query.h"
#include "campusfl/trainer/model_trainer.h"
#include "nlohmann/json.hpp"

namespace campusfl {

enum class SessionKind { kFl, kFa };

std::string_view SessionKindName(SessionKind kind);

struct SessionConfig {
  std::string session_id;  // assigned when empty
  SessionKind kind = SessionKind::kFl;

  // Learning sessions.
  std::string workload = "sleep";
  std::string model_id;
  int64_t model_version = 0;  // 0 = latest active
  Hyperparams hyperparams;
  DpConfig dp;

  // Analytics sessions.
  std::optional<FaQuery> query;

  int rounds = 1;
  int min_clients = 1;
  // Joined clients awaited before round 1 starts; min_clients if unset.
  std::optional<int> target_clients;
  double client_fraction = 1.0;
  int64_t round_timeout_ms = 30000;
  int64_t join_timeout_ms = 30000;
  uint64_t seed = 0;

  int port = 0;  // assigned by the server

  int effective_target() const {
    return target_clients.value_or(min_clients);
  }

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

nlohmann::json SessionConfigToJson(const SessionConfig& cfg);

// `allow_port` is false for requests (the server picks the port) and true
// when reading persisted configs. Missing optional fields take defaults.
// Errors: InvalidConfig.
absl::StatusOr<SessionConfig> SessionConfigFromJson(const nlohmann::json& doc,
                                                    bool allow_port);

// Errors: InvalidConfig.
absl::Status ValidateSessionConfig(const SessionConfig& cfg);

// k = min(joined, max(min_clients, ceil(fraction * joined))).
int SelectionSize(int joined, int min_clients, double fraction);

struct RoundRecord {
  std::string session_id;
  int64_t round = 0;
  int n_selected = 0;
  int n_completed = 0;
  double global_loss = 0;
  // MSE for regression, accuracy for classification.
  double global_metric = 0;
  int64_t started_at = 0;
  int64_t ended_at = 0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

nlohmann::json RoundRecordToJson(const RoundRecord& record);
absl::StatusOr<RoundRecord> RoundRecordFromJson(const nlohmann::json& doc);

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_SESSION_CONFIG_H_
