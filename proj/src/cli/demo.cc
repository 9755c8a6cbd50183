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

#include "campusfl/cli/demo.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <utility>

#include "absl/strings/str_cat.h"
#include "campusfl/analytics/recommend.h"
#include "campusfl/base/clock.h"
#include "campusfl/base/status.h"
#include "campusfl/orchestrator/admin_server.h"
#include "campusfl/orchestrator/orchestrator.h"
#include "campusfl/protocol/codec.h"
#include "campusfl/sim/fleet.h"
#include "campusfl/sim/fleet_runner.h"
#include "httplib.h"

namespace campusfl {
namespace {

using nlohmann::json;

constexpr int kSessionTimeoutMs = 60000;

absl::Status BadOption(std::string detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidOption",
                   std::move(detail));
}

// Thin JSON client for the admin API.
class AdminClient {
 public:
  explicit AdminClient(int port) : http_("127.0.0.1", port) {
    http_.set_read_timeout(kSessionTimeoutMs / 1000, 0);
  }

  absl::StatusOr<json> Get(const std::string& path) {
    return Check(path, http_.Get(path));
  }
  absl::StatusOr<json> Post(const std::string& path, const std::string& body) {
    return Check(path, http_.Post(path, body, "application/json"));
  }

 private:
  absl::StatusOr<json> Check(const std::string& path,
                             const httplib::Result& res) {
    if (!res) {
      return MakeError(absl::StatusCode::kUnavailable, "AdminUnreachable",
                       path);
    }
    json body = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (res->status >= 400) {
      const std::string kind =
          body.is_object() ? body.value("error", "HttpError") : "HttpError";
      const std::string detail =
          body.is_object() ? body.value("detail", res->body) : res->body;
      return MakeError(absl::StatusCode::kFailedPrecondition, kind,
                       absl::StrCat(path, ": ", detail));
    }
    return body;
  }

  httplib::Client http_;
};

struct Harness {
  LogicalClock clock;
  std::unique_ptr<Orchestrator> orch;
  std::unique_ptr<AdminServer> admin;
  std::unique_ptr<AdminClient> api;

  ~Harness() {
    if (admin) admin->Stop();
    if (orch) orch->Shutdown();
  }
};

absl::Status StartHarness(const DemoOptions& options, Harness& h) {
  OrchestratorConfig cfg;
  cfg.admin_port = 0;
  cfg.pool_base = options.pool_base;
  cfg.pool_size = options.pool_size;
  cfg.data_dir = options.data_dir;
  cfg.seed = options.seed;
  CAMPUSFL_ASSIGN_OR_RETURN(h.orch, Orchestrator::Create(cfg, &h.clock));
  h.admin = std::make_unique<AdminServer>(h.orch.get());
  CAMPUSFL_ASSIGN_OR_RETURN(int port, h.admin->Start("127.0.0.1", 0));
  h.api = std::make_unique<AdminClient>(port);
  return absl::OkStatus();
}

json SessionRequest(const DemoOptions& options) {
  const int n = options.clients;
  return {{"min_clients", std::max(1, n / 2)},
          {"target_clients", n},
          {"client_fraction", 1.0},
          {"round_timeout_ms", kSessionTimeoutMs},
          {"join_timeout_ms", kSessionTimeoutMs},
          {"seed", options.seed}};
}

// Creates the session over HTTP, discovers it through the task endpoint
// like a device would, runs the fleet and waits for the verdict.
absl::StatusOr<SessionView> RunSession(Harness& h, const json& request,
                                       const std::vector<DeviceProfile>& fleet,
                                       int* clients_ok) {
  CAMPUSFL_ASSIGN_OR_RETURN(json created,
                            h.api->Post("/api/sessions", request.dump()));
  const std::string id = created.at("session_id").get<std::string>();
  CAMPUSFL_ASSIGN_OR_RETURN(
      json manifest_doc,
      h.api->Post("/api/tasks",
                  PayloadToJson(TaskRequest{Platform::kNameKeyed, "1.0"})
                      .dump()));
  CAMPUSFL_ASSIGN_OR_RETURN(Payload manifest,
                            PayloadFromJson("TaskManifest", manifest_doc));
  std::optional<TaskEntry> task;
  for (const TaskEntry& t : std::get<TaskManifest>(manifest).tasks) {
    if (t.task_id == id) task = t;
  }
  if (!task.has_value()) {
    return MakeError(absl::StatusCode::kInternal, "TaskMissing", id);
  }
  *clients_ok = 0;
  for (const auto& report : RunFleet(fleet, *task, "127.0.0.1")) {
    *clients_ok += report.ok();
  }
  CAMPUSFL_ASSIGN_OR_RETURN(SessionView view,
                            h.orch->WaitSession(id, kSessionTimeoutMs));
  if (view.state.phase != Phase::kCompleted) {
    return MakeError(absl::StatusCode::kAborted, "SessionFailed",
                     absl::StrCat(id, ": ", view.state.reason));
  }
  return view;
}

absl::Status RunLearning(const DemoOptions& options, Harness& h,
                         DemoResult& result) {
  CAMPUSFL_ASSIGN_OR_RETURN(Workload workload, ParseWorkload(options.task));
  const std::string model_id =
      workload == Workload::kSleep ? "sleep_eff" : "activity_mlp";
  const CanonicalModel initial =
      WorkloadInitialModel(workload, model_id, options.seed);
  CAMPUSFL_RETURN_IF_ERROR(
      h.api->Post("/api/models", ModelToJson(initial).dump()).status());

  // Full-batch steps for the linear sleep model; small batches for the MLP.
  const Hyperparams hp =
      workload == Workload::kSleep
          ? Hyperparams{0.1, 5, std::nullopt, options.seed}
          : Hyperparams{0.1, 5, 8, options.seed};
  json request = SessionRequest(options);
  request["kind"] = "FL";
  request["workload"] = options.task;
  request["model_id"] = model_id;
  request["rounds"] = options.rounds;
  request["hyperparams"] = HyperparamsToJson(hp);
  request["dp"] = DpConfigToJson(options.dp);

  int clients_ok = 0;
  CAMPUSFL_ASSIGN_OR_RETURN(
      SessionView view,
      RunSession(h, request, GenerateFleet(options.clients, options.seed),
                 &clients_ok));
  CAMPUSFL_ASSIGN_OR_RETURN(
      json rounds, h.api->Get(absl::StrCat("/api/sessions/",
                                           view.config.session_id, "/rounds")));
  CAMPUSFL_ASSIGN_OR_RETURN(result.global_params,
                            h.orch->GlobalParams(view.config.session_id));
  json& s = result.summary;
  s["clients_completed"] = clients_ok;
  s["rounds"] = static_cast<int64_t>(rounds.size());
  s["final_global_loss"] = rounds.back().at("global_loss");
  json metric = json::array();
  for (const json& r : rounds) metric.push_back(r.at("global_metric"));
  if (workload == Workload::kSleep) {
    s["final_global_mse"] = rounds.back().at("global_metric");
    s["mse_by_round"] = std::move(metric);
  } else {
    s["accuracy"] = rounds.back().at("global_metric");
    s["accuracy_by_round"] = std::move(metric);
  }
  return absl::OkStatus();
}

absl::StatusOr<json> RunQuery(const DemoOptions& options, Harness& h,
                              const FaQuery& query, int* clients_ok) {
  json request = SessionRequest(options);
  request["kind"] = "FA";
  request["query"] = QueryToJson(query);
  CAMPUSFL_ASSIGN_OR_RETURN(
      SessionView view,
      RunSession(h, request, GenerateFleet(options.clients, options.seed),
                 clients_ok));
  (void)view;
  return h.api->Get(absl::StrCat("/api/queries/", query.query_id, "/result"));
}

absl::Status RunHitters(const DemoOptions& options, Harness& h,
                        DemoResult& result) {
  HeavyHittersQuery hh;
  hh.buckets = BucketSpec::DefaultSteps();
  hh.k = 3;
  hh.epsilon = options.fa_epsilon.value_or(4.0);
  int clients_ok = 0;
  CAMPUSFL_ASSIGN_OR_RETURN(
      json answer,
      RunQuery(options, h, FaQuery{"steps-hitters", hh}, &clients_ok));
  result.summary["clients_completed"] = clients_ok;
  result.summary["rounds"] = 1;
  result.summary["fa_result"] = std::move(answer);
  return absl::OkStatus();
}

// The server learns only the noisy cohort means; each device compares its
// own statistics against them locally.
absl::Status RunRecommend(const DemoOptions& options, Harness& h,
                          DemoResult& result) {
  const double epsilon = options.fa_epsilon.value_or(10.0);
  const DpMeanQuery steps_q{"steps", 0, 20000, epsilon};
  const DpMeanQuery calories_q{"calories", 1000, 3500, epsilon};
  int ok_steps = 0, ok_calories = 0;
  CAMPUSFL_ASSIGN_OR_RETURN(
      json steps,
      RunQuery(options, h, FaQuery{"cohort-steps", steps_q}, &ok_steps));
  CAMPUSFL_ASSIGN_OR_RETURN(
      json calories,
      RunQuery(options, h, FaQuery{"cohort-calories", calories_q},
               &ok_calories));
  const CohortStats cohort{steps.at("estimate").get<double>(),
                           calories.at("estimate").get<double>()};
  std::map<std::string, int> steps_bands, calorie_bands;
  for (const DeviceProfile& p : GenerateFleet(options.clients, options.seed)) {
    const auto records = GenerateHealthData(p, DefaultFleetConfig().days);
    CAMPUSFL_ASSIGN_OR_RETURN(double user_steps,
                              LocalStatistic(records, "steps"));
    CAMPUSFL_ASSIGN_OR_RETURN(double user_calories,
                              LocalStatistic(records, "calories"));
    const Recommendation rec =
        Recommend(cohort, UserStats{user_steps, user_calories});
    ++steps_bands[std::string(BandName(rec.steps))];
    ++calorie_bands[std::string(BandName(rec.calories))];
  }
  json& s = result.summary;
  s["clients_completed"] = std::min(ok_steps, ok_calories);
  s["rounds"] = 1;
  s["fa_result"] = {{"steps", std::move(steps)},
                    {"calories", std::move(calories)}};
  s["recommendations"] = {{"steps", steps_bands}, {"calories", calorie_bands}};
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<DemoResult> RunDemo(const DemoOptions& options) {
  if (options.clients < 1) return BadOption("--clients must be >= 1");
  if (options.rounds < 1) return BadOption("--rounds must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  Harness h;
  CAMPUSFL_RETURN_IF_ERROR(StartHarness(options, h));
  DemoResult result;
  result.summary = {{"task", options.task},
                    {"clients", options.clients},
                    {"seed", options.seed}};
  if (options.task == "sleep" || options.task == "activity") {
    CAMPUSFL_RETURN_IF_ERROR(RunLearning(options, h, result));
  } else if (options.task == "hitters") {
    CAMPUSFL_RETURN_IF_ERROR(RunHitters(options, h, result));
  } else if (options.task == "recommend") {
    CAMPUSFL_RETURN_IF_ERROR(RunRecommend(options, h, result));
  } else {
    return BadOption(absl::StrCat("unknown task '", options.task, "'"));
  }
  result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  if (options.timing) result.summary["duration_ms"] = result.duration_ms;
  return result;
}

}  // namespace campusfl
