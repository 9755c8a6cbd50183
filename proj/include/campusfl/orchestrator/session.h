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

#ifndef CAMPUSFL_ORCHESTRATOR_SESSION_H_
#define CAMPUSFL_ORCHESTRATOR_SESSION_H_

#include <atomic>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/base/clock.h"
#include "campusfl/model/canonical_model.h"
#include "campusfl/orchestrator/session_config.h"
#include "campusfl/orchestrator/session_state.h"
#include "campusfl/orchestrator/store.h"
#include "campusfl/protocol/transport.h"
#include "campusfl/trainer/dataset.h"
#include "campusfl/trainer/model_trainer.h"
#include "nlohmann/json.hpp"

namespace campusfl {

// Read-only snapshot of a session, live or recovered.
struct SessionView {
  SessionConfig config;
  SessionState state;
  int n_clients_joined = 0;
  std::vector<RoundRecord> rounds;
  std::optional<nlohmann::json> fa_result;
};

// The listing form served to the console.
nlohmann::json SessionViewToJson(const SessionView& view);

struct SessionDeps {
  Store* store = nullptr;
  Clock* clock = nullptr;
  // Called from the session thread once the port is closed.
  std::function<void(const std::string& session_id, int port)> on_finished;
};

// One FL or FA server: its own listener, round thread and client table.
class Session {
 public:
  // `model` is the registered starting point (FL only); `validation` is the
  // server-held split used for global_loss.
  // Errors: IncompatibleModel.
  static absl::StatusOr<std::unique_ptr<Session>> Create(
      SessionConfig config, std::optional<CanonicalModel> model,
      Dataset validation, std::unique_ptr<Listener> listener,
      SessionDeps deps);

  ~Session();

  void Start();
  // Moves a non-terminal session to Failed{Stopped}.
  void Stop();
  // Waits for both threads.
  void Join();
  // Waits until the session is terminal and its port released. False on
  // timeout.
  bool WaitUntilTerminal(int timeout_ms);

  SessionView View() const;
  std::vector<SessionState> History() const;
  std::vector<double> GlobalParams() const;
  const SessionConfig& config() const { return config_; }
  // True once the round thread has released its port and is about to exit.
  bool finished() const { return finished_; }

 private:
  struct Client {
    std::shared_ptr<Connection> conn;
    Platform platform = Platform::kNameKeyed;
  };

  Session(SessionConfig config, std::optional<CanonicalModel> model,
          Dataset validation, std::optional<ModelTrainer> evaluator,
          std::unique_ptr<Listener> listener, SessionDeps deps);

  void AcceptLoop();
  void Admit(std::unique_ptr<Connection> conn);
  void RunLoop();
  // Each returns the terminal state to enter.
  SessionState RunFl();
  SessionState RunFa();
  bool WaitForClients();

  std::map<std::string, Client> SnapshotClients() const;
  void DropClient(const std::string& id, const std::shared_ptr<Connection>& conn);
  void Broadcast(const Payload& payload);
  absl::Status SendTo(const Client& client, const Payload& payload);
  void Enter(const SessionState& next);
  void Finish(const SessionState& terminal);
  int64_t Now() { return deps_.clock->NowMillis(); }

  const SessionConfig config_;
  std::optional<CanonicalModel> model_;
  Dataset validation_;
  std::optional<ModelTrainer> evaluator_;
  std::unique_ptr<Listener> listener_;
  SessionDeps deps_;

  std::atomic<bool> stop_{false};
  std::atomic<bool> accepting_{true};
  std::atomic<bool> finished_{false};
  std::thread accept_thread_;
  std::thread round_thread_;
  std::mutex join_mu_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  SessionStateMachine machine_;
  std::map<std::string, Client> clients_;
  std::vector<double> global_;
  std::vector<RoundRecord> records_;
  std::optional<nlohmann::json> fa_result_;
};

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_SESSION_H_
