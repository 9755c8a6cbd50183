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

#include "campusfl/sim/client.h"

#include <memory>
#include <utility>

#include "absl/strings/str_cat.h"
#include "campusfl/aggregation/dp.h"
#include "campusfl/analytics/deidentify.h"
#include "campusfl/analytics/local_dp.h"
#include "campusfl/base/random.h"
#include "campusfl/base/status.h"
#include "campusfl/protocol/transport.h"
#include "campusfl/trainer/model_trainer.h"

namespace campusfl {
namespace {

absl::Status ProtocolError(const std::string& detail) {
  return MakeError(absl::StatusCode::kFailedPrecondition, "ProtocolError",
                   detail);
}

absl::Status ConnectionLost(const absl::Status& cause) {
  return MakeError(absl::StatusCode::kUnavailable, "ConnectionLost",
                   cause.ToString());
}

bool IsTransportFailure(const absl::Status& status) {
  const std::string kind = ErrorKind(status);
  return kind == "ConnectionClosed" || kind == "Timeout";
}

class ClientSession {
 public:
  ClientSession(const DeviceProfile& profile,
                const std::vector<HealthRecord>& records,
                const TaskEntry& task, const ClientOptions& options)
      : profile_(profile), records_(records), task_(task), options_(options) {
    report_.client_id = profile.client_id;
  }

  absl::StatusOr<ClientReport> Run() {
    bool retried = false;
    while (true) {
      absl::Status status = ConnectAndServe();
      if (status.ok()) return report_;
      if (!IsTransportFailure(status)) return status;
      if (retried) return ConnectionLost(status);
      retried = true;
    }
  }

 private:
  // Returns OK once the session is over for this client.
  absl::Status ConnectAndServe() {
    CAMPUSFL_ASSIGN_OR_RETURN(
        conn_, Connect(options_.host, options_.port, options_.connect_timeout_ms));
    CAMPUSFL_RETURN_IF_ERROR(Send(JoinRequest{
        profile_.client_id, profile_.platform, options_.app_version}));
    while (true) {
      auto msg = conn_->Receive(options_.idle_timeout_ms);
      if (!msg.ok()) {
        // A hang-up after our only report is a normal ending for analytics.
        if (report_.reported && ErrorKind(msg.status()) == "ConnectionClosed") {
          return absl::OkStatus();
        }
        return msg.status();
      }
      CAMPUSFL_ASSIGN_OR_RETURN(bool done, Handle(*msg));
      if (done) return absl::OkStatus();
    }
  }

  absl::Status Send(Payload payload) {
    return conn_->Send(Message{kProtocolVersion, options_.session_id,
                               std::move(payload)});
  }

  absl::StatusOr<bool> Handle(const Message& msg) {
    if (const auto* m = std::get_if<JoinAccept>(&msg.payload)) {
      if (m->model_spec.has_value() && !trainer_.has_value()) {
        CAMPUSFL_ASSIGN_OR_RETURN(Workload workload, ParseWorkload(task_.kind));
        data_ = BuildDataset(workload, records_, profile_.archetype);
        runtime_ = std::make_unique<DeviceRuntime>(*m->model_spec,
                                                   profile_.platform);
        CAMPUSFL_ASSIGN_OR_RETURN(
            trainer_, ModelTrainer::Create(*m->model_spec, profile_.seed));
      }
      return false;
    }
    if (const auto* m = std::get_if<FitIns>(&msg.payload)) {
      CAMPUSFL_RETURN_IF_ERROR(Fit(*m));
      return false;
    }
    if (const auto* m = std::get_if<EvaluateIns>(&msg.payload)) {
      CAMPUSFL_RETURN_IF_ERROR(LoadGlobal(m->params));
      CAMPUSFL_ASSIGN_OR_RETURN(Evaluation eval, trainer_->Evaluate(data_));
      CAMPUSFL_RETURN_IF_ERROR(Send(EvaluateRes{
          m->round, eval.loss, eval.metric, static_cast<int64_t>(data_.size())}));
      return false;
    }
    if (const auto* m = std::get_if<FaQueryIns>(&msg.payload)) {
      CAMPUSFL_RETURN_IF_ERROR(Report(m->query));
      return false;
    }
    if (const auto* m = std::get_if<RoundEnd>(&msg.payload)) {
      return m->done;
    }
    if (const auto* m = std::get_if<ErrorMsg>(&msg.payload)) {
      return MakeError(absl::StatusCode::kAborted, m->code, m->detail);
    }
    return ProtocolError(
        absl::StrCat("unexpected ", std::string(TypeName(msg.payload)),
                     " from server"));
  }

  absl::Status LoadGlobal(const std::vector<double>& params) {
    if (!trainer_.has_value()) return ProtocolError("no model before FitIns");
    CAMPUSFL_RETURN_IF_ERROR(runtime_->Load(params));
    return trainer_->SetParameters(runtime_->params());
  }

  absl::Status Fit(const FitIns& ins) {
    CAMPUSFL_RETURN_IF_ERROR(LoadGlobal(ins.params));
    Hyperparams hp = ins.hyperparams;
    hp.seed = MixSeed(MixSeed(hp.seed, profile_.seed),
                      static_cast<uint64_t>(ins.round));
    CAMPUSFL_ASSIGN_OR_RETURN(TrainReport trained, trainer_->Fit(data_, hp));
    CAMPUSFL_ASSIGN_OR_RETURN(std::vector<double> exported,
                              runtime_->Export(trainer_->GetParameters()));
    Rng dp_rng(MixSeed(MixSeed(profile_.seed, "dp"),
                       static_cast<uint64_t>(ins.round)));
    CAMPUSFL_ASSIGN_OR_RETURN(
        std::vector<double> update,
        PrivatizeUpdate(ins.params, exported, task_.dp.value_or(DpConfig{}),
                        dp_rng));
    CAMPUSFL_RETURN_IF_ERROR(
        Send(FitRes{ins.round, std::move(update), trained.num_examples}));
    ++report_.rounds_participated;
    report_.final_local_loss = trained.final_loss;
    return absl::OkStatus();
  }

  absl::Status Report(const FaQuery& query) {
    // Seeded from the query so that simulated runs replay exactly; a real
    // device would draw from NewPseudonym().
    Rng rng(MixSeed(MixSeed(profile_.seed, "fa"), query.query_id));
    RawRecord raw{profile_.client_id, {}, profile_.cluster};
    PerturbedReport skeleton = DeIdentify(raw, query.query_id, rng);
    FaReportRes res{skeleton.pseudonym, int64_t{0}, skeleton.cluster};
    if (const auto* hh = std::get_if<HeavyHittersQuery>(&query.kind)) {
      CAMPUSFL_ASSIGN_OR_RETURN(double value,
                                LocalStatistic(records_, hh->attribute));
      CAMPUSFL_ASSIGN_OR_RETURN(int bucket, Bucketize(value, hh->buckets));
      res.payload = static_cast<int64_t>(
          KrrPerturb(bucket, hh->buckets.num_buckets(), hh->epsilon, rng));
    } else {
      const auto& mean = std::get<DpMeanQuery>(query.kind);
      CAMPUSFL_ASSIGN_OR_RETURN(double value,
                                LocalStatistic(records_, mean.attribute));
      res.payload = LocalDpMeanContribution(value, mean, rng);
    }
    CAMPUSFL_RETURN_IF_ERROR(Send(std::move(res)));
    report_.reported = true;
    return absl::OkStatus();
  }

  const DeviceProfile& profile_;
  const std::vector<HealthRecord>& records_;
  const TaskEntry& task_;
  const ClientOptions& options_;

  std::unique_ptr<Connection> conn_;
  std::unique_ptr<DeviceRuntime> runtime_;
  std::optional<ModelTrainer> trainer_;
  Dataset data_;
  ClientReport report_;
};

}  // namespace

DeviceRuntime::DeviceRuntime(ModelSpec spec, Platform platform)
    : spec_(std::move(spec)), platform_(platform) {}

absl::Status DeviceRuntime::Load(const std::vector<double>& canonical) {
  const PlatformEncoding encoded =
      EncodeForPlatform(CanonicalModel{spec_, canonical}, platform_);
  CAMPUSFL_ASSIGN_OR_RETURN(params_, DecodeFromPlatform(encoded, spec_));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> DeviceRuntime::Export(
    const std::vector<double>& trained) const {
  const PlatformEncoding encoded =
      EncodeForPlatform(CanonicalModel{spec_, trained}, platform_);
  return DecodeFromPlatform(encoded, spec_);
}

absl::StatusOr<ClientReport> RunClient(const DeviceProfile& profile,
                                       const std::vector<HealthRecord>& records,
                                       const TaskEntry& task,
                                       const ClientOptions& options) {
  return ClientSession(profile, records, task, options).Run();
}

}  // namespace campusfl
