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

#include "campusfl/orchestrator/session.h"

#include <algorithm>
#include <chrono>
#include <utility>

#include "absl/strings/str_cat.h"
#include "campusfl/aggregation/fedavg.h"
#include "campusfl/analytics/heavy_hitters.h"
#include "campusfl/analytics/local_dp.h"
#include "campusfl/base/random.h"
#include "campusfl/base/status.h"
#include "glog/logging.h"

namespace campusfl {
namespace {

using SteadyClock = std::chrono::steady_clock;
using nlohmann::json;

constexpr int kPollSliceMs = 200;
constexpr int kHandshakeTimeoutMs = 2000;

int SliceUntil(SteadyClock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - SteadyClock::now())
                        .count();
  return static_cast<int>(std::clamp<int64_t>(left, 0, kPollSliceMs));
}

// Uniform k-subset of `ids` (already sorted), returned sorted.
std::vector<std::string> SelectClients(std::vector<std::string> ids, int k,
                                       Rng& rng) {
  for (size_t i = 0; i < static_cast<size_t>(k); ++i) {
    const size_t j = i + UniformIndex(rng, ids.size() - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(static_cast<size_t>(k));
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

json SessionViewToJson(const SessionView& view) {
  const int64_t completed = static_cast<int64_t>(view.rounds.size());
  json doc = {{"session_id", view.config.session_id},
              {"kind", SessionKindName(view.config.kind)},
              {"state", PhaseName(view.state.phase)},
              {"port", view.config.port},
              {"current_round", std::max(view.state.round, completed)},
              {"rounds", view.config.rounds},
              {"n_clients_joined", view.n_clients_joined}};
  doc["failure_reason"] = view.state.phase == Phase::kFailed
                              ? json(view.state.reason)
                              : json(nullptr);
  doc["last_global_loss"] = view.rounds.empty()
                                ? json(nullptr)
                                : json(view.rounds.back().global_loss);
  return doc;
}

absl::StatusOr<std::unique_ptr<Session>> Session::Create(
    SessionConfig config, std::optional<CanonicalModel> model,
    Dataset validation, std::unique_ptr<Listener> listener,
    SessionDeps deps) {
  std::optional<ModelTrainer> evaluator;
  if (config.kind == SessionKind::kFl) {
    auto incompatible = [](const absl::Status& s) {
      return MakeError(absl::StatusCode::kInvalidArgument, "IncompatibleModel",
                       std::string(s.message()));
    };
    if (!model.has_value()) {
      return MakeError(absl::StatusCode::kInvalidArgument, "IncompatibleModel",
                       "FL session without a model");
    }
    auto trainer = ModelTrainer::Create(model->spec, 0);
    if (!trainer.ok()) return incompatible(trainer.status());
    if (auto s = trainer->SetParameters(model->params); !s.ok()) {
      return incompatible(s);
    }
    if (auto eval = trainer->Evaluate(validation); !eval.ok()) {
      return incompatible(eval.status());
    }
    evaluator = *std::move(trainer);
  }
  return std::unique_ptr<Session>(
      new Session(std::move(config), std::move(model), std::move(validation),
                  std::move(evaluator), std::move(listener), std::move(deps)));
}

Session::Session(SessionConfig config, std::optional<CanonicalModel> model,
                 Dataset validation, std::optional<ModelTrainer> evaluator,
                 std::unique_ptr<Listener> listener, SessionDeps deps)
    : config_(std::move(config)),
      model_(std::move(model)),
      validation_(std::move(validation)),
      evaluator_(std::move(evaluator)),
      listener_(std::move(listener)),
      deps_(std::move(deps)) {
  if (model_.has_value()) global_ = model_->params;
}

Session::~Session() {
  Stop();
  Join();
}

void Session::Start() {
  Enter(SessionState{Phase::kWaitingForClients});
  accept_thread_ = std::thread([this] { AcceptLoop(); });
  round_thread_ = std::thread([this] { RunLoop(); });
}

void Session::Stop() {
  stop_ = true;
  std::lock_guard<std::mutex> lock(mu_);
  cv_.notify_all();
}

void Session::Join() {
  std::lock_guard<std::mutex> lock(join_mu_);
  if (round_thread_.joinable()) round_thread_.join();
  if (accept_thread_.joinable()) accept_thread_.join();
}

bool Session::WaitUntilTerminal(int timeout_ms) {
  std::unique_lock<std::mutex> lock(mu_);
  return cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                      [this] { return finished_.load(); });
}

SessionView Session::View() const {
  std::lock_guard<std::mutex> lock(mu_);
  return SessionView{config_, machine_.current(),
                     static_cast<int>(clients_.size()), records_, fa_result_};
}

std::vector<SessionState> Session::History() const {
  std::lock_guard<std::mutex> lock(mu_);
  return machine_.history();
}

std::vector<double> Session::GlobalParams() const {
  std::lock_guard<std::mutex> lock(mu_);
  return global_;
}

void Session::AcceptLoop() {
  while (accepting_) {
    auto conn = listener_->Accept(kPollSliceMs);
    if (!conn.ok() || *conn == nullptr) continue;
    Admit(*std::move(conn));
  }
}

void Session::Admit(std::unique_ptr<Connection> conn) {
  auto msg = conn->Receive(kHandshakeTimeoutMs);
  if (!msg.ok()) return;
  const auto* join = std::get_if<JoinRequest>(&msg->payload);
  auto reject = [&](const char* code, std::string detail) {
    (void)conn->Send(Message{kProtocolVersion, config_.session_id,
                             ErrorMsg{code, std::move(detail)}});
  };
  if (join == nullptr) {
    return reject("ProtocolError",
                  absl::StrCat("expected JoinRequest, got ",
                               std::string(TypeName(msg->payload))));
  }
  if (msg->session != config_.session_id) {
    return reject("UnknownSession", msg->session);
  }
  SessionState state;
  {
    std::lock_guard<std::mutex> lock(mu_);
    state = machine_.current();
  }
  if (state.terminal()) return reject("SessionClosed", config_.session_id);
  std::optional<ModelSpec> spec;
  if (model_.has_value()) spec = model_->spec;
  if (!conn->Send(Message{kProtocolVersion, config_.session_id,
                          JoinAccept{state.round, spec}})
           .ok()) {
    return;
  }
  VLOG(1) << config_.session_id << ": " << join->client_id << " joined";
  std::lock_guard<std::mutex> lock(mu_);
  // A rejoin replaces the previous connection.
  clients_[join->client_id] = Client{std::move(conn), join->platform};
  cv_.notify_all();
}

std::map<std::string, Session::Client> Session::SnapshotClients() const {
  std::lock_guard<std::mutex> lock(mu_);
  return clients_;
}

void Session::DropClient(const std::string& id,
                         const std::shared_ptr<Connection>& conn) {
  VLOG(1) << config_.session_id << ": dropping " << id;
  std::lock_guard<std::mutex> lock(mu_);
  auto it = clients_.find(id);
  if (it != clients_.end() && it->second.conn == conn) clients_.erase(it);
}

absl::Status Session::SendTo(const Client& client, const Payload& payload) {
  return client.conn->Send(
      Message{kProtocolVersion, config_.session_id, payload});
}

void Session::Broadcast(const Payload& payload) {
  for (const auto& [id, client] : SnapshotClients()) {
    if (!SendTo(client, payload).ok()) DropClient(id, client.conn);
  }
}

void Session::Enter(const SessionState& next) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!machine_.Transition(next).ok()) return;
    cv_.notify_all();
  }
  if (deps_.store != nullptr) {
    (void)deps_.store->Append(Store::Log::kSessions,
                              {{"event", "state"},
                               {"session_id", config_.session_id},
                               {"state", StateToJson(next)},
                               {"at", Now()}});
  }
}

bool Session::WaitForClients() {
  const auto deadline =
      SteadyClock::now() + std::chrono::milliseconds(config_.join_timeout_ms);
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    if (stop_) return false;
    const int joined = static_cast<int>(clients_.size());
    if (joined >= config_.effective_target()) return true;
    if (SteadyClock::now() >= deadline) return joined >= config_.min_clients;
    cv_.wait_for(lock, std::chrono::milliseconds(SliceUntil(deadline) + 1));
  }
}

void Session::RunLoop() {
  SessionState terminal;
  if (!WaitForClients()) {
    terminal = Failed(stop_ ? "Stopped" : "InsufficientClients");
  } else {
    terminal = config_.kind == SessionKind::kFl ? RunFl() : RunFa();
  }
  Finish(terminal);
  std::lock_guard<std::mutex> lock(mu_);
  finished_ = true;
  cv_.notify_all();
}

SessionState Session::RunFl() {
  const auto stopped = [] { return Failed("Stopped"); };
  const size_t n_params = global_.size();
  for (int64_t round = 1; round <= config_.rounds; ++round) {
    if (stop_) return stopped();
    Enter(SessionState{Phase::kInRound, round});
    const int64_t started_at = Now();
    std::vector<ClientUpdate> updates;
    int n_selected = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
      updates.clear();
      const std::map<std::string, Client> clients = SnapshotClients();
      std::vector<std::string> ids;
      for (const auto& [id, client] : clients) ids.push_back(id);
      const int k = SelectionSize(static_cast<int>(ids.size()),
                                  config_.min_clients, config_.client_fraction);
      Rng rng(MixSeed(MixSeed(MixSeed(config_.seed, "select"),
                              static_cast<uint64_t>(round)),
                      static_cast<uint64_t>(attempt)));
      const std::vector<std::string> selected =
          SelectClients(std::move(ids), k, rng);
      n_selected = k;
      std::vector<std::string> asked;
      std::vector<double> current;
      {
        std::lock_guard<std::mutex> lock(mu_);
        current = global_;
      }
      for (const std::string& id : selected) {
        const Client& client = clients.at(id);
        if (SendTo(client, FitIns{round, current, config_.hyperparams}).ok()) {
          asked.push_back(id);
        } else {
          DropClient(id, client.conn);
        }
      }
      const auto deadline = SteadyClock::now() +
                            std::chrono::milliseconds(config_.round_timeout_ms);
      for (const std::string& id : asked) {
        const Client& client = clients.at(id);
        while (!stop_ && SteadyClock::now() < deadline) {
          auto msg = client.conn->Receive(SliceUntil(deadline));
          if (!msg.ok()) {
            if (ErrorKind(msg.status()) == "Timeout") continue;
            DropClient(id, client.conn);
            break;
          }
          const auto* res = std::get_if<FitRes>(&msg->payload);
          // Late answers from earlier rounds and unsolicited messages are
          // discarded.
          if (res == nullptr || res->round != round) continue;
          if (res->params.size() == n_params && res->num_examples > 0) {
            updates.push_back(ClientUpdate{id, round, res->params,
                                           res->num_examples, client.platform});
          }
          break;
        }
      }
      if (stop_) return stopped();
      if (static_cast<int>(updates.size()) >= config_.min_clients) break;
      if (attempt == 0) {
        LOG(WARNING) << config_.session_id << ": round " << round << " got "
                     << updates.size() << " of " << config_.min_clients
                     << " required updates, retrying";
      }
    }
    if (static_cast<int>(updates.size()) < config_.min_clients) {
      return Failed("InsufficientClients");
    }
    Enter(SessionState{Phase::kAggregating, round});
    auto aggregated = FedAvg(updates);
    if (!aggregated.ok()) {
      return Failed(absl::StrCat("AggregationFailed: ",
                                 std::string(aggregated.status().message())));
    }
    (void)evaluator_->SetParameters(*aggregated);
    auto eval = evaluator_->Evaluate(validation_);
    RoundRecord record{config_.session_id,
                       round,
                       n_selected,
                       static_cast<int>(updates.size()),
                       eval.ok() ? eval->loss : 0.0,
                       eval.ok() ? eval->metric : 0.0,
                       started_at,
                       Now()};
    {
      std::lock_guard<std::mutex> lock(mu_);
      global_ = *aggregated;
      records_.push_back(record);
    }
    if (deps_.store != nullptr) {
      (void)deps_.store->Append(Store::Log::kRounds, RoundRecordToJson(record));
    }
    LOG(INFO) << config_.session_id << ": round " << round << " "
              << record.n_completed << "/" << record.n_selected
              << " clients, global_loss " << record.global_loss;
    const bool done = round == config_.rounds;
    Broadcast(RoundEnd{round, *aggregated, done});
    if (done) return SessionState{Phase::kCompleted, round};
  }
  return SessionState{Phase::kCompleted, config_.rounds};
}

SessionState Session::RunFa() {
  const FaQuery& query = *config_.query;
  Enter(SessionState{Phase::kInRound, 1});
  const std::map<std::string, Client> clients = SnapshotClients();
  std::vector<std::string> asked;
  for (const auto& [id, client] : clients) {
    if (SendTo(client, FaQueryIns{query}).ok()) {
      asked.push_back(id);
    } else {
      DropClient(id, client.conn);
    }
  }
  std::vector<PerturbedReport> reports;
  const auto deadline = SteadyClock::now() +
                        std::chrono::milliseconds(config_.round_timeout_ms);
  for (const std::string& id : asked) {
    const Client& client = clients.at(id);
    while (!stop_ && SteadyClock::now() < deadline) {
      auto msg = client.conn->Receive(SliceUntil(deadline));
      if (!msg.ok()) {
        if (ErrorKind(msg.status()) == "Timeout") continue;
        DropClient(id, client.conn);
        break;
      }
      const auto* res = std::get_if<FaReportRes>(&msg->payload);
      if (res == nullptr) continue;
      // The server sees only the pseudonym, never `id`.
      reports.push_back(PerturbedReport{query.query_id, res->pseudonym,
                                        res->payload, res->cluster});
      break;
    }
  }
  if (stop_) return Failed("Stopped");
  if (static_cast<int>(reports.size()) < config_.min_clients) {
    return Failed("InsufficientClients");
  }
  Enter(SessionState{Phase::kAggregating, 1});
  json result;
  if (std::holds_alternative<HeavyHittersQuery>(query.kind)) {
    auto hh = HeavyHitters(reports, query);
    if (!hh.ok()) {
      return Failed(absl::StrCat("AggregationFailed: ",
                                 std::string(hh.status().message())));
    }
    result = FaResultToJson(*hh);
  } else {
    auto mean = AggregateDpMean(reports, query);
    if (!mean.ok()) {
      return Failed(absl::StrCat("AggregationFailed: ",
                                 std::string(mean.status().message())));
    }
    result = FaResultToJson(*mean);
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    fa_result_ = result;
  }
  if (deps_.store != nullptr) {
    (void)deps_.store->Append(Store::Log::kFaResults,
                              {{"session_id", config_.session_id},
                               {"query_id", query.query_id},
                               {"result", result},
                               {"at", Now()}});
  }
  Broadcast(RoundEnd{1, {}, true});
  return SessionState{Phase::kCompleted, 1};
}

void Session::Finish(const SessionState& terminal) {
  if (terminal.phase == Phase::kFailed) {
    LOG(WARNING) << config_.session_id << " failed: " << terminal.reason;
    Broadcast(ErrorMsg{"SessionFailed", terminal.reason});
  }
  accepting_ = false;
  listener_->Shutdown();
  if (accept_thread_.joinable()) accept_thread_.join();
  const int port = config_.port;
  {
    std::lock_guard<std::mutex> lock(mu_);
    clients_.clear();
  }
  listener_.reset();
  // Persist and publish the terminal state only after the port is closed,
  // so observers that see it can immediately reuse the port.
  Enter(terminal);
  if (deps_.on_finished) deps_.on_finished(config_.session_id, port);
}

}  // namespace campusfl
