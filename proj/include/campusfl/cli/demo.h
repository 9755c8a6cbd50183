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

#ifndef CAMPUSFL_CLI_DEMO_H_
#define CAMPUSFL_CLI_DEMO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/aggregation/dp.h"
#include "nlohmann/json.hpp"

namespace campusfl {

struct DemoOptions {
  // sleep | activity | recommend | hitters
  std::string task = "sleep";
  int clients = 10;
  // Learning tasks only; analytics queries run a single round.
  int rounds = 20;
  uint64_t seed = 1;
  // Learning tasks: update privatization (disabled by default).
  DpConfig dp;
  // Analytics tasks: per-report privacy budget.
  std::optional<double> fa_epsilon;
  int pool_base = 9001;
  int pool_size = 16;
  // Empty keeps the run in memory.
  std::string data_dir;
  bool timing = false;
};

struct DemoResult {
  // {task, clients, rounds, seed, final_global_mse | accuracy | fa_result,
  //  ...}; duration_ms only when timing was requested.
  nlohmann::json summary;
  // Final global model of a learning task.
  std::vector<double> global_params;
  int64_t duration_ms = 0;
};

// Starts an orchestrator and its admin API in-process, drives it over HTTP
// like an operator would (upload model, create session), then runs a
// simulated fleet against the session over loopback sockets.
// Errors: InvalidArgument for bad options, SessionFailed, plus anything the
// orchestrator reports.
absl::StatusOr<DemoResult> RunDemo(const DemoOptions& options);

}  // namespace campusfl

#endif  // CAMPUSFL_CLI_DEMO_H_
