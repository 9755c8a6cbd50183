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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "campusfl/base/clock.h"
#include "campusfl/cli/cli.h"
#include "campusfl/orchestrator/admin_server.h"
#include "campusfl/orchestrator/orchestrator.h"
#include "campusfl/sim/fleet.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "nlohmann/json.hpp"

namespace campusfl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ::testing::HasSubstr;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "campusfl");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun run;
  run.code = CliMain(static_cast<int>(argv.size()), argv.data(), out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

// Below the ephemeral range; see orchestrator_test.
std::string PortBase() {
  return std::to_string(25000 + static_cast<int>(getpid() % 100) * 50);
}

std::string TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("campusfl_cli_" + std::to_string(getpid()) + "_" + name);
  fs::remove_all(dir);
  return dir.string();
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

TEST(CliTest, UnknownSubcommandIsUsageError) {
  CliRun run = RunCli({"frobnicate"});
  EXPECT_EQ(run.code, 2);
  EXPECT_THAT(run.err, HasSubstr("Usage"));
}

TEST(CliTest, MissingSubcommandIsUsageError) {
  EXPECT_EQ(RunCli({}).code, 2);
}

TEST(CliTest, BadFlagsAreUsageErrors) {
  EXPECT_EQ(RunCli({"demo", "--task", "dance"}).code, 2);
  EXPECT_EQ(RunCli({"demo", "--clients", "many"}).code, 2);
  EXPECT_EQ(RunCli({"demo", "--bogus"}).code, 2);
  EXPECT_EQ(RunCli({"server"}).code, 2);
  EXPECT_EQ(RunCli({"server", "--config", "/nonexistent/cfg.json"}).code, 2);
}

TEST(CliTest, HelpExitsZero) {
  CliRun run = RunCli({"--help"});
  EXPECT_EQ(run.code, 0);
  EXPECT_THAT(run.out + run.err, HasSubstr("demo"));
}

TEST(CliTest, DemoSleepPrintsSummary) {
  CliRun run = RunCli({"demo", "--task", "sleep", "--clients", "4",
                       "--rounds", "3", "--seed", "2", "--port-base",
                       PortBase()});
  ASSERT_EQ(run.code, 0) << run.err;
  const json summary = json::parse(run.out);
  EXPECT_EQ(summary["task"], "sleep");
  EXPECT_EQ(summary["rounds"], 3);
  EXPECT_EQ(summary["clients_completed"], 4);
  EXPECT_EQ(summary["mse_by_round"].size(), 3u);
  EXPECT_TRUE(summary["final_global_mse"].is_number());
  EXPECT_FALSE(summary.contains("duration_ms"));
  EXPECT_THAT(run.err, HasSubstr("duration_ms: "));
}

TEST(CliTest, DemoTimingGoesIntoSummary) {
  CliRun run = RunCli({"demo", "--task", "sleep", "--clients", "2",
                       "--rounds", "1", "--timing", "--port-base", PortBase()});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_TRUE(json::parse(run.out).contains("duration_ms"));
}

TEST(CliTest, DemoHittersIsDeterministic) {
  const std::vector<std::string> args = {"demo",    "--task",      "hitters",
                                         "--clients", "100",       "--seed",
                                         "1",        "--port-base", PortBase()};
  CliRun first = RunCli(args);
  CliRun second = RunCli(args);
  ASSERT_EQ(first.code, 0) << first.err;
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(first.out, second.out);
  const json summary = json::parse(first.out);
  EXPECT_EQ(summary["fa_result"]["n_reports"], 100);
  ASSERT_EQ(summary["fa_result"]["per_cluster"].size(), 4u);
  for (const json& cluster : summary["fa_result"]["per_cluster"]) {
    EXPECT_EQ(cluster["top"].size(), 3u);
  }
}

TEST(CliTest, DemoRecommendReportsBands) {
  CliRun run = RunCli({"demo", "--task", "recommend", "--clients", "30",
                       "--port-base", PortBase()});
  ASSERT_EQ(run.code, 0) << run.err;
  const json summary = json::parse(run.out);
  EXPECT_TRUE(summary["fa_result"].contains("steps"));
  EXPECT_TRUE(summary["fa_result"].contains("calories"));
  EXPECT_TRUE(summary.contains("recommendations"));
}

TEST(CliTest, PersistedStateIsReproducibleAndInspectable) {
  const std::string dir_a = TempDir("a");
  const std::string dir_b = TempDir("b");
  for (const std::string& dir : {dir_a, dir_b}) {
    CliRun run = RunCli({"demo", "--task", "activity", "--clients", "6",
                         "--rounds", "2", "--seed", "3", "--data-dir", dir,
                         "--port-base", PortBase()});
    ASSERT_EQ(run.code, 0) << run.err;
  }
  for (const char* file : {"registry.jsonl", "sessions.jsonl", "rounds.jsonl",
                           "fa_results.jsonl"}) {
    EXPECT_EQ(ReadFile(fs::path(dir_a) / file), ReadFile(fs::path(dir_b) / file))
        << file;
  }

  CliRun inspect = RunCli({"inspect", "--data-dir", dir_a});
  ASSERT_EQ(inspect.code, 0) << inspect.err;
  std::istringstream lines(inspect.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const json record = json::parse(line);
    EXPECT_EQ(record["round"], ++n);
  }
  EXPECT_EQ(n, 2);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST(CliTest, InspectMissingDirFails) {
  CliRun run = RunCli({"inspect", "--data-dir", TempDir("missing")});
  EXPECT_EQ(run.code, 1);
  EXPECT_THAT(run.err, HasSubstr("NoDataDir"));
}

TEST(CliTest, FleetServesLiveSessions) {
  OrchestratorConfig cfg;
  cfg.pool_base = std::stoi(PortBase()) + 30;
  cfg.pool_size = 4;
  cfg.seed = 9;
  LogicalClock clock;
  auto orch = Orchestrator::Create(cfg, &clock);
  ASSERT_TRUE(orch.ok()) << orch.status();
  AdminServer admin(orch->get());
  auto admin_port = admin.Start("127.0.0.1", 0);
  ASSERT_TRUE(admin_port.ok()) << admin_port.status();

  httplib::Client http("127.0.0.1", *admin_port);
  const CanonicalModel model =
      WorkloadInitialModel(Workload::kSleep, "sleep_eff", 0);
  auto upload =
      http.Post("/api/models", ModelToJson(model).dump(), "application/json");
  ASSERT_TRUE(upload);
  ASSERT_EQ(upload->status, 201) << upload->body;
  const json session = {{"kind", "FL"},
                        {"model_id", "sleep_eff"},
                        {"rounds", 2},
                        {"min_clients", 3},
                        {"target_clients", 3},
                        {"join_timeout_ms", 10000},
                        {"round_timeout_ms", 10000}};
  auto created =
      http.Post("/api/sessions", session.dump(), "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201) << created->body;
  const std::string id = json::parse(created->body)["session_id"];

  CliRun run = RunCli({"fleet", "--n", "3", "--server",
                       "127.0.0.1:" + std::to_string(*admin_port), "--seed",
                       "4"});
  ASSERT_EQ(run.code, 0) << run.err;
  const json report = json::parse(run.out);
  ASSERT_EQ(report["tasks"].size(), 1u);
  EXPECT_EQ(report["tasks"][0]["task_id"], id);
  EXPECT_EQ(report["tasks"][0]["completed"], 3);

  auto done = (*orch)->WaitSession(id, 30000);
  ASSERT_TRUE(done.ok()) << done.status();
  auto rounds = http.Get("/api/sessions/" + id + "/rounds");
  ASSERT_TRUE(rounds);
  EXPECT_EQ(json::parse(rounds->body).size(), 2u);
  admin.Stop();
  (*orch)->Shutdown();
}

TEST(CliTest, FleetWithUnreachableServerFails) {
  CliRun run = RunCli({"fleet", "--n", "2", "--server", "127.0.0.1:1"});
  EXPECT_EQ(run.code, 1);
  EXPECT_THAT(run.err, HasSubstr("error: "));
}

}  // namespace
}  // namespace campusfl
