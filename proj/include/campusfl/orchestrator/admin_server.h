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

#ifndef CAMPUSFL_ORCHESTRATOR_ADMIN_SERVER_H_
#define CAMPUSFL_ORCHESTRATOR_ADMIN_SERVER_H_

#include <memory>
#include <string>
#include <thread>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "campusfl/orchestrator/orchestrator.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace campusfl {

// HTTP status for an error returned by the orchestrator.
int HttpStatusFor(const absl::Status& status);

// JSON admin API over an Orchestrator:
//
//   GET  /api/health                 {status, live_sessions}
//   GET  /api/models                 [{model_id, version, ...}]
//   POST /api/models                 201 (new) or 200 (identical re-upload)
//   GET  /api/models/:id[/:version]
//   POST /api/sessions               201 + config with port
//   GET  /api/sessions
//   GET  /api/sessions/:id
//   POST /api/sessions/:id/stop
//   GET  /api/sessions/:id/rounds
//   GET  /api/queries/:id/result
//   POST /api/tasks                  TaskRequest -> TaskManifest
//
// Errors are {error: kind, detail} with 400, 404, 409 or 503.
class AdminServer {
 public:
  explicit AdminServer(Orchestrator* orchestrator);
  ~AdminServer();

  // Binds and serves on a background thread; port 0 picks a free port.
  // Errors: BindFailed.
  absl::StatusOr<int> Start(const std::string& host, int port);
  // Serves on the calling thread until Stop.
  absl::Status Run(const std::string& host, int port);
  void Stop();

 private:
  void Routes();

  Orchestrator* orch_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_ADMIN_SERVER_H_
