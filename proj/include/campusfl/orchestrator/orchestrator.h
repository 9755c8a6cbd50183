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

#ifndef CAMPUSFL_ORCHESTRATOR_ORCHESTRATOR_H_
#define CAMPUSFL_ORCHESTRATOR_ORCHESTRATOR_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/base/clock.h"
#include "campusfl/orchestrator/port_pool.h"
#include "campusfl/orchestrator/registry.h"
#include "campusfl/orchestrator/session.h"
#include "campusfl/orchestrator/store.h"
#include "campusfl/protocol/message.h"
#include "nlohmann/json.hpp"

namespace campusfl {

struct OrchestratorConfig {
  std::string host = "127.0.0.1";
  int admin_port = 8080;
  int pool_base = 9001;
  int pool_size = 16;
  // Empty keeps everything in memory.
  std::string data_dir;
  // Salts the validation splits.
  uint64_t seed = 0;
};

// {admin_port, fl_port_pool: {base, size}, data_dir, seed}; `host` is
// optional. Errors: InvalidConfig.
absl::StatusOr<OrchestratorConfig> OrchestratorConfigFromJson(
    const nlohmann::json& doc);
absl::StatusOr<OrchestratorConfig> LoadOrchestratorConfig(
    const std::string& path);

// Model registry, session table and port pool behind one lock. Sessions run
// on their own threads; no lock here is held across network waits.
class Orchestrator {
 public:
  // Replays the data directory. Sessions that were live when the previous
  // process died are recorded as Failed{Interrupted}.
  // Errors: StorageError, StorageCorrupt.
  static absl::StatusOr<std::unique_ptr<Orchestrator>> Create(
      OrchestratorConfig config, Clock* clock);

  ~Orchestrator();

  // Errors: InvalidModel.
  absl::StatusOr<ModelRegistry::Registered> RegisterModel(
      std::string_view document);
  std::vector<RegistryEntry> ListModels() const;
  // Errors: UnknownModel.
  absl::StatusOr<RegistryEntry> GetModel(const std::string& model_id,
                                         int64_t version) const;

  // Assigns the session id (when empty) and the port, then starts it.
  // Errors: InvalidConfig, UnknownModel, IncompatibleModel,
  // PortPoolExhausted, DuplicateSession.
  absl::StatusOr<SessionConfig> CreateSession(SessionConfig config);

  // Newest last, recovered sessions first.
  std::vector<SessionView> ListSessions() const;
  // Errors: UnknownSession.
  absl::StatusOr<SessionView> GetSession(const std::string& id) const;
  // Errors: UnknownSession.
  absl::Status StopSession(const std::string& id);
  // Blocks until the session is terminal or `timeout_ms` passes.
  // Errors: UnknownSession, Timeout.
  absl::StatusOr<SessionView> WaitSession(const std::string& id,
                                          int timeout_ms);
  // Errors: UnknownSession.
  absl::StatusOr<std::vector<RoundRecord>> Rounds(const std::string& id) const;
  // Final global parameters of a live or finished in-process session.
  // Errors: UnknownSession.
  absl::StatusOr<std::vector<double>> GlobalParams(const std::string& id) const;
  // Looks up by query_id, then by session_id. Errors: UnknownQuery.
  absl::StatusOr<nlohmann::json> QueryResult(const std::string& id) const;

  // Sessions accepting clients, each with its port. Every registered model
  // has an encoding for both platforms, so `request` filters nothing today.
  TaskManifest ListTasks(const TaskRequest& request) const;

  int LiveSessions() const;
  std::vector<int> PortsInUse() const;

  // Stops every live session and waits for them.
  void Shutdown();

  const OrchestratorConfig& config() const { return config_; }

 private:
  Orchestrator(OrchestratorConfig config, Clock* clock,
               std::unique_ptr<Store> store)
      : config_(std::move(config)),
        clock_(clock),
        store_(std::move(store)),
        ports_(config_.pool_base, config_.pool_size) {}

  absl::Status Recover();
  void OnFinished(const std::string& id, int port);
  std::shared_ptr<Session> Find(const std::string& id) const;
  // Moves finished sessions to the archive so their threads are released.
  void ReapLocked();

  const OrchestratorConfig config_;
  Clock* clock_;
  std::unique_ptr<Store> store_;

  mutable std::mutex mu_;
  ModelRegistry registry_;
  PortPool ports_;
  int64_t next_session_ = 1;
  // Insertion order of every known session id.
  std::vector<std::string> order_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  // Sessions restored from disk or reaped after finishing.
  std::map<std::string, SessionView> archived_;
  std::map<std::string, std::vector<double>> final_params_;
};

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_ORCHESTRATOR_H_
