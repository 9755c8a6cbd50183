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

#include "campusfl/orchestrator/orchestrator.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "campusfl/base/status.h"
#include "campusfl/protocol/transport.h"
#include "campusfl/sim/fleet.h"

namespace campusfl {
namespace {

using nlohmann::json;

absl::Status InvalidConfig(std::string detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidConfig",
                   std::move(detail));
}

absl::Status Corrupt(const std::string& file, std::string detail) {
  return MakeError(absl::StatusCode::kDataLoss, "StorageCorrupt",
                   absl::StrCat(file, ": ", detail));
}

absl::Status UnknownSession(const std::string& id) {
  return MakeError(absl::StatusCode::kNotFound, "UnknownSession", id);
}

std::string ManifestKind(const SessionConfig& cfg) {
  if (cfg.kind == SessionKind::kFl) return cfg.workload;
  return std::holds_alternative<HeavyHittersQuery>(cfg.query->kind)
             ? "heavy_hitters"
             : "dp_mean";
}

}  // namespace

absl::StatusOr<OrchestratorConfig> OrchestratorConfigFromJson(
    const json& doc) {
  if (!doc.is_object()) return InvalidConfig("config is not an object");
  static const std::set<std::string> kKeys = {"admin_port", "fl_port_pool",
                                              "data_dir", "seed", "host"};
  for (const auto& [key, value] : doc.items()) {
    if (kKeys.count(key) == 0) return InvalidConfig("unknown key '" + key + "'");
  }
  OrchestratorConfig cfg;
  try {
    cfg.admin_port = doc.at("admin_port").get<int>();
    const json& pool = doc.at("fl_port_pool");
    cfg.pool_base = pool.at("base").get<int>();
    cfg.pool_size = pool.at("size").get<int>();
    cfg.data_dir = doc.at("data_dir").get<std::string>();
    cfg.seed = doc.value("seed", uint64_t{0});
    if (doc.contains("host")) cfg.host = doc.at("host").get<std::string>();
  } catch (const json::exception& e) {
    return InvalidConfig(e.what());
  }
  if (cfg.admin_port < 0 || cfg.admin_port > 65535) {
    return InvalidConfig("admin_port out of range");
  }
  if (cfg.pool_size < 1 || cfg.pool_base < 1 ||
      cfg.pool_base + cfg.pool_size - 1 > 65535) {
    return InvalidConfig("fl_port_pool out of range");
  }
  return cfg;
}

absl::StatusOr<OrchestratorConfig> LoadOrchestratorConfig(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return InvalidConfig(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::exception& e) {
    return InvalidConfig(absl::StrCat(path, ": ", e.what()));
  }
  return OrchestratorConfigFromJson(doc);
}

absl::StatusOr<std::unique_ptr<Orchestrator>> Orchestrator::Create(
    OrchestratorConfig config, Clock* clock) {
  CAMPUSFL_ASSIGN_OR_RETURN(std::unique_ptr<Store> store,
                            Store::Open(config.data_dir));
  std::unique_ptr<Orchestrator> orch(
      new Orchestrator(std::move(config), clock, std::move(store)));
  CAMPUSFL_RETURN_IF_ERROR(orch->Recover());
  return orch;
}

Orchestrator::~Orchestrator() { Shutdown(); }

absl::Status Orchestrator::Recover() {
  CAMPUSFL_ASSIGN_OR_RETURN(Store::Contents contents, store_->ReadAll());
  for (size_t i = 0; i < contents.registry.size(); ++i) {
    auto entry = RegistryEntryFromJson(contents.registry[i]);
    if (!entry.ok()) {
      return Corrupt(absl::StrCat("registry.jsonl:", i + 1),
                     std::string(entry.status().message()));
    }
    CAMPUSFL_RETURN_IF_ERROR(registry_.Restore(*std::move(entry)));
  }
  for (size_t i = 0; i < contents.sessions.size(); ++i) {
    const json& event = contents.sessions[i];
    const std::string where = absl::StrCat("sessions.jsonl:", i + 1);
    try {
      const std::string kind = event.at("event").get<std::string>();
      const std::string id = event.at("session_id").get<std::string>();
      if (kind == "created") {
        auto cfg = SessionConfigFromJson(event.at("config"), true);
        if (!cfg.ok()) return Corrupt(where, std::string(cfg.status().message()));
        if (archived_.count(id) == 0) order_.push_back(id);
        archived_[id] = SessionView{*std::move(cfg), SessionState{}};
      } else if (kind == "state") {
        auto it = archived_.find(id);
        if (it == archived_.end()) return Corrupt(where, "state before created");
        auto state = StateFromJson(event.at("state"));
        if (!state.ok()) {
          return Corrupt(where, std::string(state.status().message()));
        }
        it->second.state = *std::move(state);
      } else {
        return Corrupt(where, "unknown event '" + kind + "'");
      }
    } catch (const json::exception& e) {
      return Corrupt(where, e.what());
    }
  }
  for (size_t i = 0; i < contents.rounds.size(); ++i) {
    auto record = RoundRecordFromJson(contents.rounds[i]);
    if (!record.ok()) {
      return Corrupt(absl::StrCat("rounds.jsonl:", i + 1),
                     std::string(record.status().message()));
    }
    auto it = archived_.find(record->session_id);
    if (it != archived_.end()) it->second.rounds.push_back(*std::move(record));
  }
  for (size_t i = 0; i < contents.fa_results.size(); ++i) {
    const json& doc = contents.fa_results[i];
    if (!doc.contains("session_id") || !doc.at("session_id").is_string() ||
        !doc.contains("result")) {
      return Corrupt(absl::StrCat("fa_results.jsonl:", i + 1),
                     "missing session_id or result");
    }
    auto it = archived_.find(doc.at("session_id").get<std::string>());
    if (it != archived_.end()) it->second.fa_result = doc.at("result");
  }
  for (const std::string& id : order_) {
    SessionView& view = archived_.at(id);
    if (view.state.terminal()) continue;
    // No mid-round resume: whatever was in flight is lost.
    view.state = Failed("Interrupted");
    CAMPUSFL_RETURN_IF_ERROR(
        store_->Append(Store::Log::kSessions,
                       {{"event", "state"},
                        {"session_id", id},
                        {"state", StateToJson(view.state)},
                        {"at", clock_->NowMillis()}}));
  }
  next_session_ = static_cast<int64_t>(order_.size()) + 1;
  return absl::OkStatus();
}

absl::StatusOr<ModelRegistry::Registered> Orchestrator::RegisterModel(
    std::string_view document) {
  std::lock_guard<std::mutex> lock(mu_);
  CAMPUSFL_ASSIGN_OR_RETURN(ModelRegistry::Registered reg,
                            registry_.Register(document, clock_->NowMillis()));
  if (!reg.duplicate) {
    CAMPUSFL_RETURN_IF_ERROR(store_->Append(Store::Log::kRegistry,
                                            RegistryEntryToJson(reg.entry)));
  }
  return reg;
}

std::vector<RegistryEntry> Orchestrator::ListModels() const {
  std::lock_guard<std::mutex> lock(mu_);
  return registry_.List();
}

absl::StatusOr<RegistryEntry> Orchestrator::GetModel(
    const std::string& model_id, int64_t version) const {
  std::lock_guard<std::mutex> lock(mu_);
  return registry_.Get(model_id, version);
}

absl::StatusOr<SessionConfig> Orchestrator::CreateSession(
    SessionConfig config) {
  config.port = 0;
  CAMPUSFL_RETURN_IF_ERROR(ValidateSessionConfig(config));
  std::lock_guard<std::mutex> lock(mu_);
  ReapLocked();
  if (config.session_id.empty()) {
    do {
      config.session_id = absl::StrFormat("s-%04d", next_session_++);
    } while (sessions_.count(config.session_id) > 0 ||
             archived_.count(config.session_id) > 0);
  } else if (sessions_.count(config.session_id) > 0 ||
             archived_.count(config.session_id) > 0) {
    return MakeError(absl::StatusCode::kAlreadyExists, "DuplicateSession",
                     config.session_id);
  }

  std::optional<CanonicalModel> model;
  Dataset validation;
  if (config.kind == SessionKind::kFl) {
    CAMPUSFL_ASSIGN_OR_RETURN(
        RegistryEntry entry,
        registry_.Get(config.model_id, config.model_version));
    config.model_version = entry.version();
    model = std::move(entry.model);
    CAMPUSFL_ASSIGN_OR_RETURN(Workload workload,
                              ParseWorkload(config.workload));
    validation = ValidationSplit(workload, config_.seed);
  }

  std::unique_ptr<Listener> listener;
  CAMPUSFL_ASSIGN_OR_RETURN(
      config.port, ports_.Acquire([&](int port) {
        auto bound = Listener::Bind(config_.host, port);
        if (!bound.ok()) return false;
        listener = *std::move(bound);
        return true;
      }));

  SessionDeps deps{store_.get(), clock_,
                   [this](const std::string& id, int port) {
                     OnFinished(id, port);
                   }};
  auto session = Session::Create(config, std::move(model),
                                 std::move(validation), std::move(listener),
                                 std::move(deps));
  if (!session.ok()) {
    ports_.Release(config.port);
    return session.status();
  }
  CAMPUSFL_RETURN_IF_ERROR(
      store_->Append(Store::Log::kSessions,
                     {{"event", "created"},
                      {"session_id", config.session_id},
                      {"config", SessionConfigToJson(config)},
                      {"at", clock_->NowMillis()}}));
  order_.push_back(config.session_id);
  std::shared_ptr<Session> started = *std::move(session);
  sessions_.emplace(config.session_id, started);
  started->Start();
  return config;
}

void Orchestrator::OnFinished(const std::string& /*id*/, int port) {
  std::lock_guard<std::mutex> lock(mu_);
  ports_.Release(port);
}

std::shared_ptr<Session> Orchestrator::Find(const std::string& id) const {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void Orchestrator::ReapLocked() {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (!it->second->finished()) {
      ++it;
      continue;
    }
    archived_[it->first] = it->second->View();
    final_params_[it->first] = it->second->GlobalParams();
    it->second->Join();
    it = sessions_.erase(it);
  }
}

std::vector<SessionView> Orchestrator::ListSessions() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<SessionView> views;
  for (const std::string& id : order_) {
    if (std::shared_ptr<Session> s = Find(id)) {
      views.push_back(s->View());
    } else {
      views.push_back(archived_.at(id));
    }
  }
  return views;
}

absl::StatusOr<SessionView> Orchestrator::GetSession(
    const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (std::shared_ptr<Session> s = Find(id)) return s->View();
  auto it = archived_.find(id);
  if (it == archived_.end()) return UnknownSession(id);
  return it->second;
}

absl::Status Orchestrator::StopSession(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  if (std::shared_ptr<Session> s = Find(id)) {
    s->Stop();
    return absl::OkStatus();
  }
  if (archived_.count(id) > 0) return absl::OkStatus();
  return UnknownSession(id);
}

absl::StatusOr<SessionView> Orchestrator::WaitSession(const std::string& id,
                                                      int timeout_ms) {
  std::shared_ptr<Session> session;
  {
    std::lock_guard<std::mutex> lock(mu_);
    session = Find(id);
    if (session == nullptr) {
      auto it = archived_.find(id);
      if (it == archived_.end()) return UnknownSession(id);
      return it->second;
    }
  }
  if (!session->WaitUntilTerminal(timeout_ms)) {
    return MakeError(absl::StatusCode::kDeadlineExceeded, "Timeout", id);
  }
  return session->View();
}

absl::StatusOr<std::vector<RoundRecord>> Orchestrator::Rounds(
    const std::string& id) const {
  CAMPUSFL_ASSIGN_OR_RETURN(SessionView view, GetSession(id));
  return view.rounds;
}

absl::StatusOr<std::vector<double>> Orchestrator::GlobalParams(
    const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (std::shared_ptr<Session> s = Find(id)) return s->GlobalParams();
  auto it = final_params_.find(id);
  if (it == final_params_.end()) return UnknownSession(id);
  return it->second;
}

absl::StatusOr<json> Orchestrator::QueryResult(const std::string& id) const {
  std::optional<json> by_session;
  for (const SessionView& view : ListSessions()) {
    if (!view.fa_result.has_value()) continue;
    if (view.config.query.has_value() && view.config.query->query_id == id) {
      return absl::StatusOr<json>(*view.fa_result);
    }
    if (view.config.session_id == id) by_session = view.fa_result;
  }
  if (by_session.has_value()) return absl::StatusOr<json>(*by_session);
  return MakeError(absl::StatusCode::kNotFound, "UnknownQuery", id);
}

TaskManifest Orchestrator::ListTasks(const TaskRequest& /*request*/) const {
  TaskManifest manifest;
  std::lock_guard<std::mutex> lock(mu_);
  for (const std::string& id : order_) {
    std::shared_ptr<Session> s = Find(id);
    if (s == nullptr) continue;
    const SessionView view = s->View();
    if (view.state.phase != Phase::kWaitingForClients &&
        view.state.phase != Phase::kInRound) {
      continue;
    }
    const SessionConfig& cfg = view.config;
    TaskEntry task{cfg.session_id, std::nullopt, 0, ManifestKind(cfg), cfg.port,
                   std::nullopt, std::nullopt};
    if (cfg.kind == SessionKind::kFl) {
      task.model_id = cfg.model_id;
      task.model_version = cfg.model_version;
      task.hyperparams = cfg.hyperparams;
      task.dp = cfg.dp;
    }
    manifest.tasks.push_back(std::move(task));
  }
  return manifest;
}

int Orchestrator::LiveSessions() const {
  std::lock_guard<std::mutex> lock(mu_);
  int live = 0;
  for (const auto& [id, session] : sessions_) {
    if (!session->View().state.terminal()) ++live;
  }
  return live;
}

std::vector<int> Orchestrator::PortsInUse() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<int> ports;
  for (int p = ports_.base(); p < ports_.base() + ports_.size(); ++p) {
    if (ports_.InUse(p)) ports.push_back(p);
  }
  return ports;
}

void Orchestrator::Shutdown() {
  std::vector<std::shared_ptr<Session>> sessions;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [id, session] : sessions_) sessions.push_back(session);
  }
  for (const auto& s : sessions) s->Stop();
  for (const auto& s : sessions) s->Join();
}

}  // namespace campusfl
