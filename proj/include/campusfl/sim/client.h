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

#ifndef CAMPUSFL_SIM_CLIENT_H_
#define CAMPUSFL_SIM_CLIENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "campusfl/model/canonical_model.h"
#include "campusfl/model/platform_encoding.h"
#include "campusfl/protocol/message.h"
#include "campusfl/sim/fleet.h"
#include "campusfl/trainer/dataset.h"

namespace campusfl {

// Holds a device's parameters in its platform layout. Everything that goes
// in or out passes through the platform encoding.
class DeviceRuntime {
 public:
  DeviceRuntime(ModelSpec spec, Platform platform);

  // Canonical flat vector -> platform layout -> trainer.
  absl::Status Load(const std::vector<double>& canonical);
  // Trainer -> platform layout -> canonical flat vector.
  absl::StatusOr<std::vector<double>> Export(
      const std::vector<double>& trained) const;

  const std::vector<double>& params() const { return params_; }
  Platform platform() const { return platform_; }

 private:
  ModelSpec spec_;
  Platform platform_;
  std::vector<double> params_;
};

struct ClientOptions {
  std::string host = "127.0.0.1";
  int port = 0;
  std::string session_id;
  std::string app_version = "1.0";
  int connect_timeout_ms = 5000;
  // Longest silence tolerated while waiting for the server.
  int idle_timeout_ms = 60000;
};

struct ClientReport {
  std::string client_id;
  int rounds_participated = 0;
  std::optional<double> final_local_loss;
  bool reported = false;
};

// Runs one device against one session until RoundEnd{done}, the server
// hangs up after completion, or an error. A dropped connection is retried
// once by rejoining.
//
// Errors: ConnectionLost, ProtocolError, plus training failures.
absl::StatusOr<ClientReport> RunClient(const DeviceProfile& profile,
                                       const std::vector<HealthRecord>& records,
                                       const TaskEntry& task,
                                       const ClientOptions& options);

}  // namespace campusfl

#endif  // CAMPUSFL_SIM_CLIENT_H_
