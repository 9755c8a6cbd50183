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

#include <cmath>
#include <set>
#include <thread>

#include "campusfl/analytics/local_dp.h"
#include "campusfl/base/status.h"
#include "campusfl/protocol/transport.h"
#include "campusfl/sim/client.h"
#include "campusfl/sim/fleet.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace campusfl {
namespace {

using ::testing::ElementsAre;

TEST(GenerateFleetTest, DeterministicInSeed) {
  const auto a = GenerateFleet(100, 7);
  const auto b = GenerateFleet(100, 7);
  ASSERT_EQ(a.size(), 100u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].client_id, b[i].client_id);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].platform, b[i].platform);
    EXPECT_EQ(a[i].archetype, b[i].archetype);
    EXPECT_EQ(a[i].cluster, b[i].cluster);
  }
  const auto c = GenerateFleet(100, 8);
  EXPECT_NE(a[0].seed, c[0].seed);
}

TEST(GenerateFleetTest, FourDevicesCoverEveryCluster) {
  std::set<std::string> clusters;
  for (const auto& p : GenerateFleet(4, 1)) clusters.insert(p.cluster);
  EXPECT_EQ(clusters.size(), 4u);
  EXPECT_EQ(clusters, std::set<std::string>(DefaultFleetConfig().clusters.begin(),
                                            DefaultFleetConfig().clusters.end()));
}

TEST(GenerateFleetTest, PlatformsSplitEvenlyAndIdsUnique) {
  int name_keyed = 0;
  std::set<std::string> ids;
  std::set<uint64_t> seeds;
  for (const auto& p : GenerateFleet(100, 3)) {
    name_keyed += p.platform == Platform::kNameKeyed;
    ids.insert(p.client_id);
    seeds.insert(p.seed);
  }
  EXPECT_EQ(name_keyed, 50);
  EXPECT_EQ(ids.size(), 100u);
  EXPECT_EQ(seeds.size(), 100u);
}

TEST(GenerateFleetTest, ArchetypesRoundRobin) {
  const auto fleet = GenerateFleet(6, 0);
  EXPECT_EQ(fleet[0].archetype, Archetype::kSedentary);
  EXPECT_EQ(fleet[1].archetype, Archetype::kModerate);
  EXPECT_EQ(fleet[2].archetype, Archetype::kActive);
  EXPECT_EQ(fleet[3].archetype, Archetype::kSedentary);
}

TEST(SleepEfficiencyTest, WorkedExamples) {
  EXPECT_DOUBLE_EQ(SleepEfficiency(0, 10000, 7.5, 0), 1.0);
  EXPECT_NEAR(SleepEfficiency(10, 0, 3, 0), 0.46, 1e-12);
  // Unclamped interior point: 0.85 - 0.15 + 0.12 - 0.01 = 0.81.
  EXPECT_NEAR(SleepEfficiency(5, 8000, 7, 0), 0.81, 1e-12);
}

TEST(GenerateHealthDataTest, MillionLabelsStayInUnitInterval) {
  int64_t n = 0;
  for (const auto& profile : GenerateFleet(1000, 11)) {
    for (const HealthRecord& r : GenerateHealthData(profile, 1000)) {
      ASSERT_GE(r.sleep_efficiency, 0.0);
      ASSERT_LE(r.sleep_efficiency, 1.0);
      ASSERT_GE(r.steps, 0.0);
      ASSERT_GE(r.screen_h, 0.0);
      ASSERT_GE(r.sleep_h, 0.0);
      ASSERT_GE(r.calories, 0.0);
      ASSERT_GE(r.avg_heart_rate, 0.0);
      ++n;
    }
  }
  EXPECT_EQ(n, 1000000);
}

TEST(GenerateHealthDataTest, DeterministicAndFollowsArchetype) {
  const auto fleet = GenerateFleet(3, 5);
  const auto a = GenerateHealthData(fleet[2], 30);
  const auto b = GenerateHealthData(fleet[2], 30);
  ASSERT_EQ(a.size(), 30u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].day, static_cast<int>(i));
    EXPECT_EQ(a[i].steps, b[i].steps);
    EXPECT_EQ(a[i].sleep_efficiency, b[i].sleep_efficiency);
  }
  // Per-archetype sample means over many days sit near the configured means.
  for (int k = 0; k < kNumArchetypes; ++k) {
    const ArchetypeParams& params = DefaultFleetConfig().archetypes[k];
    const auto records = GenerateHealthData(fleet[k], 20000);
    double steps = 0, screen = 0;
    for (const auto& r : records) {
      steps += r.steps;
      screen += r.screen_h;
    }
    // 5 standard errors.
    EXPECT_NEAR(steps / 20000, params.steps.mean,
                5 * params.steps.sd / std::sqrt(20000.0));
    EXPECT_NEAR(screen / 20000, params.screen_h.mean,
                5 * params.screen_h.sd / std::sqrt(20000.0) + 0.01);
  }
}

TEST(FleetConfigTest, DefaultsMatchCheckedInFile) {
  const FleetConfig& cfg = DefaultFleetConfig();
  EXPECT_EQ(cfg.days, 30);
  EXPECT_DOUBLE_EQ(cfg.label_noise_sd, 0.02);
  EXPECT_THAT(cfg.clusters,
              ElementsAre("class-2025", "class-2026", "class-2027",
                          "class-2028"));
  EXPECT_DOUBLE_EQ(cfg.archetypes[2].steps.mean, 12000);
  EXPECT_DOUBLE_EQ(cfg.archetypes[2].steps.sd, 2000);
}

TEST(FleetConfigTest, RejectsMalformedConfig) {
  EXPECT_EQ(ErrorKind(FleetConfigFromJson(nlohmann::json::array()).status()),
            "InvalidConfig");
  EXPECT_EQ(ErrorKind(FleetConfigFromJson({{"days", 0}}).status()),
            "InvalidConfig");
}

TEST(LocalStatisticTest, MeansAndErrors) {
  std::vector<HealthRecord> records(2);
  records[0].steps = 1000;
  records[1].steps = 3000;
  EXPECT_DOUBLE_EQ(*LocalStatistic(records, "steps"), 2000);
  EXPECT_EQ(ErrorKind(LocalStatistic(records, "mood").status()),
            "UnknownAttribute");
  EXPECT_EQ(ErrorKind(LocalStatistic({}, "steps").status()), "EmptyInput");
}

TEST(WorkloadTest, DatasetsMatchModelSpecs) {
  const auto fleet = GenerateFleet(3, 2);
  const auto records = GenerateHealthData(fleet[1], 30);
  for (Workload w : {Workload::kSleep, Workload::kActivity}) {
    const Dataset data = BuildDataset(w, records, fleet[1].archetype);
    EXPECT_EQ(data.size(), 30u);
    auto trainer =
        ModelTrainer::Create(WorkloadInitialModel(w, "m", 1).spec, 1);
    ASSERT_TRUE(trainer.ok());
    EXPECT_TRUE(trainer->Evaluate(data).ok()) << WorkloadName(w);
    EXPECT_EQ(*ParseWorkload(WorkloadName(w)), w);
  }
  EXPECT_EQ(ErrorKind(ParseWorkload("karaoke").status()), "UnknownWorkload");
}

TEST(WorkloadTest, ValidationSplitIsSeededAndDisjointFromFleets) {
  const Dataset a = ValidationSplit(Workload::kSleep, 1);
  const Dataset b = ValidationSplit(Workload::kSleep, 1);
  const Dataset c = ValidationSplit(Workload::kSleep, 2);
  EXPECT_EQ(a.size(), 30u * 30u);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.labels, c.labels);
  // No client fleet on the same seed reproduces the validation devices.
  const auto fleet = GenerateFleet(30, 1);
  const Dataset pooled_first =
      BuildDataset(Workload::kSleep, GenerateHealthData(fleet[0], 30),
                   fleet[0].archetype);
  EXPECT_NE(pooled_first.labels[0], a.labels[0]);
}

// The device runtime's encode/decode path must not change a single bit
// relative to a client that hands its trainer the canonical vector directly.
TEST(DeviceRuntimeTest, EncodingIsTransparent) {
  const CanonicalModel model =
      WorkloadInitialModel(Workload::kActivity, "act", 3);
  const auto fleet = GenerateFleet(2, 9);
  const Dataset data = BuildDataset(
      Workload::kActivity, GenerateHealthData(fleet[0], 30), fleet[0].archetype);
  Hyperparams hp{0.05, 2, 8, 17};

  auto direct = ModelTrainer::Create(model.spec, 0);
  ASSERT_TRUE(direct->SetParameters(model.params).ok());
  ASSERT_TRUE(direct->Fit(data, hp).ok());

  for (Platform platform : {Platform::kNameKeyed, Platform::kIndexKeyed}) {
    DeviceRuntime runtime(model.spec, platform);
    ASSERT_TRUE(runtime.Load(model.params).ok());
    EXPECT_TRUE(testing::BitIdentical(runtime.params(), model.params));
    auto trainer = ModelTrainer::Create(model.spec, 0);
    ASSERT_TRUE(trainer->SetParameters(runtime.params()).ok());
    ASSERT_TRUE(trainer->Fit(data, hp).ok());
    auto exported = runtime.Export(trainer->GetParameters());
    ASSERT_TRUE(exported.ok());
    EXPECT_TRUE(testing::BitIdentical(*exported, direct->GetParameters()))
        << PlatformName(platform);
  }
}

// Minimal scripted server for one client.
class FakeServer {
 public:
  FakeServer() : listener_(*Listener::Bind("127.0.0.1", 0)) {}
  int port() const { return listener_->port(); }
  std::unique_ptr<Connection> Accept() { return *listener_->Accept(5000); }

 private:
  std::unique_ptr<Listener> listener_;
};

FaQuery StepsQuery(double epsilon) {
  HeavyHittersQuery hh;
  hh.buckets = BucketSpec::DefaultSteps();
  hh.epsilon = epsilon;
  return FaQuery{"q-steps", hh};
}

TEST(RunClientTest, AnalyticsClientReportsItsBucket) {
  FakeServer server;
  DeviceProfile profile = GenerateFleet(1, 4)[0];
  std::vector<HealthRecord> records(30);
  for (auto& r : records) r.steps = 2500;
  TaskEntry task{"s-1", std::nullopt, 0, "heavy_hitters", server.port(),
                 std::nullopt, std::nullopt};
  ClientOptions options;
  options.port = server.port();
  options.session_id = "s-1";

  absl::StatusOr<ClientReport> report = absl::UnknownError("unset");
  std::thread client([&] { report = RunClient(profile, records, task, options); });

  auto conn = server.Accept();
  ASSERT_NE(conn, nullptr);
  auto join = conn->Receive(5000);
  ASSERT_TRUE(join.ok());
  EXPECT_EQ(std::get<JoinRequest>(join->payload).client_id, profile.client_id);
  ASSERT_TRUE(conn->Send({kProtocolVersion, "s-1", JoinAccept{0, std::nullopt}})
                  .ok());
  ASSERT_TRUE(
      conn->Send({kProtocolVersion, "s-1", FaQueryIns{StepsQuery(50)}}).ok());
  auto res = conn->Receive(5000);
  ASSERT_TRUE(res.ok());
  const auto& fa = std::get<FaReportRes>(res->payload);
  // The bucket for 2500 steps is [2000, 4000).
  EXPECT_EQ(std::get<int64_t>(fa.payload), 1);
  EXPECT_EQ(fa.cluster, profile.cluster);
  EXPECT_EQ(fa.pseudonym.size(), 32u);
  EXPECT_EQ(fa.pseudonym.find(profile.client_id), std::string::npos);
  ASSERT_TRUE(
      conn->Send({kProtocolVersion, "s-1", RoundEnd{1, {}, true}}).ok());
  client.join();
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_TRUE(report->reported);
}

TEST(RunClientTest, LearningClientTrainsThroughItsEncoding) {
  FakeServer server;
  const auto fleet = GenerateFleet(2, 6);
  const DeviceProfile& profile = fleet[1];  // IndexKeyed
  ASSERT_EQ(profile.platform, Platform::kIndexKeyed);
  const auto records = GenerateHealthData(profile, 30);
  const CanonicalModel model = WorkloadInitialModel(Workload::kSleep, "sl", 0);
  const Hyperparams hp{0.1, 5, std::nullopt, 3};
  TaskEntry task{"s-2", "sl", 1, "sleep", server.port(), hp, DpConfig{}};
  ClientOptions options;
  options.port = server.port();
  options.session_id = "s-2";

  absl::StatusOr<ClientReport> report = absl::UnknownError("unset");
  std::thread client([&] { report = RunClient(profile, records, task, options); });
  auto conn = server.Accept();
  ASSERT_NE(conn, nullptr);
  ASSERT_TRUE(conn->Receive(5000).ok());
  ASSERT_TRUE(
      conn->Send({kProtocolVersion, "s-2", JoinAccept{0, model.spec}}).ok());
  ASSERT_TRUE(
      conn->Send({kProtocolVersion, "s-2", FitIns{1, model.params, hp}}).ok());
  auto res = conn->Receive(5000);
  ASSERT_TRUE(res.ok()) << res.status();
  const auto& fit = std::get<FitRes>(res->payload);
  EXPECT_EQ(fit.round, 1);
  EXPECT_EQ(fit.num_examples, 30);

  // Oracle: the same fit without any platform encoding.
  auto direct = ModelTrainer::Create(model.spec, profile.seed);
  ASSERT_TRUE(direct->SetParameters(model.params).ok());
  Hyperparams seeded = hp;
  seeded.seed = MixSeed(MixSeed(hp.seed, profile.seed), 1);
  ASSERT_TRUE(direct
                  ->Fit(BuildDataset(Workload::kSleep, records,
                                     profile.archetype),
                        seeded)
                  .ok());
  EXPECT_TRUE(testing::BitIdentical(fit.params, direct->GetParameters()));

  ASSERT_TRUE(conn->Send({kProtocolVersion, "s-2",
                          RoundEnd{1, fit.params, true}})
                  .ok());
  client.join();
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->rounds_participated, 1);
  EXPECT_TRUE(report->final_local_loss.has_value());
}

TEST(RunClientTest, ConnectionLostAfterOneRetry) {
  FakeServer server;
  const DeviceProfile profile = GenerateFleet(1, 1)[0];
  const auto records = GenerateHealthData(profile, 30);
  TaskEntry task{"s-3", std::nullopt, 0, "heavy_hitters", server.port(),
                 std::nullopt, std::nullopt};
  ClientOptions options;
  options.port = server.port();
  options.session_id = "s-3";

  absl::StatusOr<ClientReport> report = absl::UnknownError("unset");
  std::thread client([&] { report = RunClient(profile, records, task, options); });
  // Hang up twice, each time right after the handshake.
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto conn = server.Accept();
    ASSERT_NE(conn, nullptr) << attempt;
    auto join = conn->Receive(5000);
    ASSERT_TRUE(join.ok());
    ASSERT_TRUE(std::holds_alternative<JoinRequest>(join->payload));
    ASSERT_TRUE(
        conn->Send({kProtocolVersion, "s-3", JoinAccept{0, std::nullopt}})
            .ok());
    conn.reset();
  }
  client.join();
  EXPECT_EQ(ErrorKind(report.status()), "ConnectionLost");
}

TEST(RunClientTest, ServerErrorAbandonsRun) {
  FakeServer server;
  const DeviceProfile profile = GenerateFleet(1, 1)[0];
  const auto records = GenerateHealthData(profile, 30);
  TaskEntry task{"s-4", std::nullopt, 0, "heavy_hitters", server.port(),
                 std::nullopt, std::nullopt};
  ClientOptions options;
  options.port = server.port();
  options.session_id = "s-4";
  absl::StatusOr<ClientReport> report = absl::UnknownError("unset");
  std::thread client([&] { report = RunClient(profile, records, task, options); });
  auto conn = server.Accept();
  ASSERT_TRUE(conn->Receive(5000).ok());
  ASSERT_TRUE(conn->Send({kProtocolVersion, "s-4",
                          ErrorMsg{"SessionFailed", "InsufficientClients"}})
                  .ok());
  client.join();
  EXPECT_EQ(ErrorKind(report.status()), "SessionFailed");

  // A learning message before any model spec is a protocol violation.
  std::thread again([&] { report = RunClient(profile, records, task, options); });
  conn = server.Accept();
  ASSERT_TRUE(conn->Receive(5000).ok());
  ASSERT_TRUE(conn->Send({kProtocolVersion, "s-4",
                          JoinAccept{0, std::nullopt}})
                  .ok());
  ASSERT_TRUE(conn->Send({kProtocolVersion, "s-4", FitIns{1, {1.0}, {}}}).ok());
  again.join();
  EXPECT_EQ(ErrorKind(report.status()), "ProtocolError");
}

}  // namespace
}  // namespace campusfl
