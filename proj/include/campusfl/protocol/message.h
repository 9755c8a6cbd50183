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

#ifndef CAMPUSFL_PROTOCOL_MESSAGE_H_
#define CAMPUSFL_PROTOCOL_MESSAGE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "campusfl/aggregation/dp.h"
#include "campusfl/analytics/fa_query.h"
#include "campusfl/model/canonical_model.h"
#include "campusfl/model/platform_encoding.h"
#include "campusfl/trainer/model_trainer.h"

namespace campusfl {

inline constexpr int kProtocolVersion = 1;

struct JoinRequest {
  std::string client_id;
  Platform platform = Platform::kNameKeyed;
  std::string app_version;
  friend bool operator==(const JoinRequest&, const JoinRequest&) = default;
};

// `model_spec` is null for analytics sessions.
struct JoinAccept {
  int64_t round = 0;
  std::optional<ModelSpec> model_spec;
  friend bool operator==(const JoinAccept&, const JoinAccept&) = default;
};

struct TaskRequest {
  Platform platform = Platform::kNameKeyed;
  std::string app_version;
  friend bool operator==(const TaskRequest&, const TaskRequest&) = default;
};

// One deliverable session. Learning tasks carry a model and training
// settings; analytics tasks leave them null.
struct TaskEntry {
  std::string task_id;
  std::optional<std::string> model_id;
  int64_t model_version = 0;
  std::string kind;
  int port = 0;
  std::optional<Hyperparams> hyperparams;
  std::optional<DpConfig> dp;
  friend bool operator==(const TaskEntry&, const TaskEntry&) = default;
};

struct TaskManifest {
  std::vector<TaskEntry> tasks;
  friend bool operator==(const TaskManifest&, const TaskManifest&) = default;
};

struct FitIns {
  int64_t round = 0;
  std::vector<double> params;
  Hyperparams hyperparams;
  friend bool operator==(const FitIns&, const FitIns&) = default;
};

struct FitRes {
  int64_t round = 0;
  std::vector<double> params;
  int64_t num_examples = 0;
  friend bool operator==(const FitRes&, const FitRes&) = default;
};

struct EvaluateIns {
  int64_t round = 0;
  std::vector<double> params;
  friend bool operator==(const EvaluateIns&, const EvaluateIns&) = default;
};

struct EvaluateRes {
  int64_t round = 0;
  double loss = 0;
  double metric = 0;
  int64_t num_examples = 0;
  friend bool operator==(const EvaluateRes&, const EvaluateRes&) = default;
};

struct FaQueryIns {
  FaQuery query;
  friend bool operator==(const FaQueryIns&, const FaQueryIns&) = default;
};

struct FaReportRes {
  std::string pseudonym;
  std::variant<int64_t, double> payload = int64_t{0};
  std::optional<std::string> cluster;
  friend bool operator==(const FaReportRes&, const FaReportRes&) = default;
};

struct RoundEnd {
  int64_t round = 0;
  std::vector<double> global_params;
  bool done = false;
  friend bool operator==(const RoundEnd&, const RoundEnd&) = default;
};

struct ErrorMsg {
  std::string code;
  std::string detail;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using Payload =
    std::variant<JoinRequest, JoinAccept, TaskRequest, TaskManifest, FitIns,
                 FitRes, EvaluateIns, EvaluateRes, FaQueryIns, FaReportRes,
                 RoundEnd, ErrorMsg>;

struct Message {
  int v = kProtocolVersion;
  std::string session;
  Payload payload;
  friend bool operator==(const Message&, const Message&) = default;
};

// Wire name of the payload alternative, e.g. "FitIns".
std::string_view TypeName(const Payload& payload);

}  // namespace campusfl

#endif  // CAMPUSFL_PROTOCOL_MESSAGE_H_
