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

#include "campusfl/cli/cli.h"

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "campusfl/base/clock.h"
#include "campusfl/base/status.h"
#include "campusfl/cli/demo.h"
#include "campusfl/orchestrator/admin_server.h"
#include "campusfl/orchestrator/orchestrator.h"
#include "campusfl/orchestrator/store.h"
#include "campusfl/protocol/codec.h"
#include "campusfl/protocol/transport.h"
#include "campusfl/sim/fleet.h"
#include "campusfl/sim/fleet_runner.h"
#include "glog/logging.h"
#include "httplib.h"

namespace campusfl {
namespace {

using nlohmann::json;

constexpr int kDefaultAdminPort = 8080;

std::atomic<bool> g_interrupted{false};

void OnSignal(int) { g_interrupted = true; }

int Fail(std::ostream& err, const absl::Status& status) {
  const std::string kind = ErrorKind(status);
  err << "error: " << (kind.empty() ? "Internal" : kind) << ": "
      << status.message() << "\n";
  return 1;
}

int RunServer(const std::string& config_path, std::ostream& err) {
  auto cfg = LoadOrchestratorConfig(config_path);
  if (!cfg.ok()) return Fail(err, cfg.status());
  SystemClock clock;
  auto orch = Orchestrator::Create(*cfg, &clock);
  if (!orch.ok()) return Fail(err, orch.status());
  AdminServer admin(orch->get());
  auto port = admin.Start(cfg->host, cfg->admin_port);
  if (!port.ok()) return Fail(err, port.status());
  LOG(INFO) << "admin API on " << cfg->host << ":" << *port
            << ", session ports [" << cfg->pool_base << ", "
            << cfg->pool_base + cfg->pool_size << ")";
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  while (!g_interrupted) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  LOG(INFO) << "shutting down";
  admin.Stop();
  (*orch)->Shutdown();
  return 0;
}

int RunFleetCommand(int n, const std::string& server, uint64_t seed,
                    std::ostream& out, std::ostream& err) {
  std::string host = server;
  int port = kDefaultAdminPort;
  if (server.find(':') != std::string::npos) {
    auto parsed = ParseHostPort(server);
    if (!parsed.ok()) return Fail(err, parsed.status());
    std::tie(host, port) = *parsed;
  }
  httplib::Client http(host, port);
  const std::string request =
      PayloadToJson(TaskRequest{Platform::kNameKeyed, "1.0"}).dump();
  auto res = http.Post("/api/tasks", request, "application/json");
  if (!res) {
    return Fail(err, MakeError(absl::StatusCode::kUnavailable,
                               "AdminUnreachable", server));
  }
  if (res->status != 200) {
    return Fail(err, MakeError(absl::StatusCode::kUnknown, "HttpError",
                               absl::StrCat(res->status, " ", res->body)));
  }
  json doc = json::parse(res->body, nullptr, false);
  auto manifest = PayloadFromJson("TaskManifest", doc);
  if (!manifest.ok()) return Fail(err, manifest.status());

  const std::vector<DeviceProfile> fleet = GenerateFleet(n, seed);
  json tasks = json::array();
  bool any_failed = false;
  for (const TaskEntry& task : std::get<TaskManifest>(*manifest).tasks) {
    int ok = 0;
    std::set<std::string> errors;
    for (const auto& report : RunFleet(fleet, task, host)) {
      if (report.ok()) {
        ++ok;
      } else {
        errors.insert(ErrorKind(report.status()));
      }
    }
    any_failed |= ok == 0;
    tasks.push_back({{"task_id", task.task_id},
                     {"kind", task.kind},
                     {"port", task.port},
                     {"clients", n},
                     {"completed", ok},
                     {"errors", errors}});
  }
  out << json({{"server", server}, {"seed", seed}, {"tasks", tasks}}).dump(2)
      << "\n";
  return any_failed ? 1 : 0;
}

int RunDemoCommand(const DemoOptions& options, std::ostream& out,
                   std::ostream& err) {
  auto result = RunDemo(options);
  if (!result.ok()) return Fail(err, result.status());
  out << result->summary.dump(2) << "\n";
  if (!options.timing) err << "duration_ms: " << result->duration_ms << "\n";
  return 0;
}

int RunInspect(const std::string& data_dir, std::ostream& out,
               std::ostream& err) {
  if (!std::filesystem::is_directory(data_dir)) {
    return Fail(err, MakeError(absl::StatusCode::kNotFound, "NoDataDir",
                               data_dir));
  }
  const std::string path =
      (std::filesystem::path(data_dir) / Store::FileName(Store::Log::kRounds))
          .string();
  auto records = ReadJsonLines(path);
  if (!records.ok()) return Fail(err, records.status());
  for (const json& r : *records) out << r.dump() << "\n";
  return 0;
}

}  // namespace

int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Federated learning and analytics orchestrator", "campusfl"};
  app.require_subcommand(1);

  std::string config_path;
  auto* server = app.add_subcommand("server", "Run the orchestrator");
  server->add_option("--config", config_path, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);

  int fleet_n = 10;
  std::string fleet_server;
  uint64_t fleet_seed = 1;
  auto* fleet = app.add_subcommand(
      "fleet", "Run simulated devices against every live task of a server");
  fleet->add_option("--n", fleet_n, "Number of devices")
      ->required()
      ->check(CLI::PositiveNumber);
  fleet->add_option("--server", fleet_server, "Admin address HOST[:PORT]")
      ->required();
  fleet->add_option("--seed", fleet_seed, "Fleet seed");

  DemoOptions demo_options;
  double dp_epsilon = 0;
  double dp_sigma = -1;
  double fa_eps = 0;
  auto* demo = app.add_subcommand(
      "demo", "Run server and fleet in one process and print a summary");
  demo->add_option("--task", demo_options.task, "Task to run")
      ->required()
      ->check(CLI::IsMember({"sleep", "activity", "recommend", "hitters"}));
  demo->add_option("--clients", demo_options.clients, "Number of devices")
      ->check(CLI::PositiveNumber);
  demo->add_option("--rounds", demo_options.rounds, "Learning rounds")
      ->check(CLI::PositiveNumber);
  demo->add_option("--seed", demo_options.seed, "Seed for fleet and session");
  auto* dp_flag = demo->add_option(
      "--dp-epsilon", dp_epsilon,
      "Privatize learning updates with this epsilon");
  demo->add_option("--dp-delta", demo_options.dp.delta, "DP delta")
      ->needs(dp_flag);
  demo->add_option("--dp-clip", demo_options.dp.clip_norm, "L2 clip norm")
      ->needs(dp_flag);
  demo->add_option("--dp-sigma", dp_sigma, "Override the noise scale")
      ->needs(dp_flag);
  auto* fa_epsilon = demo->add_option("--fa-epsilon", fa_eps,
                                      "Per-report budget of analytics tasks");
  demo->add_option("--port-base", demo_options.pool_base,
                   "First session port");
  demo->add_option("--data-dir", demo_options.data_dir,
                   "Persist the run here");
  demo->add_flag("--timing", demo_options.timing,
                 "Include duration_ms in the summary");
  bool verbose = false;
  demo->add_flag("-v,--verbose", verbose, "Log session progress");

  std::string data_dir;
  auto* inspect = app.add_subcommand("inspect", "Dump persisted round records");
  inspect->add_option("--data-dir", data_dir, "Orchestrator data directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  FLAGS_logtostderr = true;
  if (*demo && !verbose) FLAGS_minloglevel = google::GLOG_WARNING;

  if (*server) return RunServer(config_path, err);
  if (*fleet) return RunFleetCommand(fleet_n, fleet_server, fleet_seed, out, err);
  if (*demo) {
    if (dp_flag->count() > 0) {
      demo_options.dp.enabled = true;
      demo_options.dp.epsilon = dp_epsilon;
      if (dp_sigma >= 0) demo_options.dp.sigma_override = dp_sigma;
    }
    if (fa_epsilon->count() > 0) demo_options.fa_epsilon = fa_eps;
    return RunDemoCommand(demo_options, out, err);
  }
  return RunInspect(data_dir, out, err);
}

}  // namespace campusfl
