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

#include "campusfl/orchestrator/session_state.h"

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kCreated:
      return "Created";
    case Phase::kWaitingForClients:
      return "WaitingForClients";
    case Phase::kInRound:
      return "InRound";
    case Phase::kAggregating:
      return "Aggregating";
    case Phase::kCompleted:
      return "Completed";
    case Phase::kFailed:
      return "Failed";
  }
  return "Created";
}

absl::StatusOr<Phase> ParsePhase(std::string_view name) {
  for (Phase p : {Phase::kCreated, Phase::kWaitingForClients, Phase::kInRound,
                  Phase::kAggregating, Phase::kCompleted, Phase::kFailed}) {
    if (PhaseName(p) == name) return p;
  }
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidState",
                   std::string(name));
}

SessionState Failed(std::string reason) {
  return SessionState{Phase::kFailed, 0, std::move(reason)};
}

bool IsLegalTransition(const SessionState& from, const SessionState& to) {
  if (from.terminal()) return false;
  if (to.phase == Phase::kFailed) return true;
  switch (from.phase) {
    case Phase::kCreated:
      return to.phase == Phase::kWaitingForClients;
    case Phase::kWaitingForClients:
      return to.phase == Phase::kInRound && to.round == 1;
    case Phase::kInRound:
      return to.phase == Phase::kAggregating && to.round == from.round;
    case Phase::kAggregating:
      return (to.phase == Phase::kInRound && to.round == from.round + 1) ||
             (to.phase == Phase::kCompleted && to.round == from.round);
    default:
      return false;
  }
}

nlohmann::json StateToJson(const SessionState& state) {
  nlohmann::json doc = {{"phase", PhaseName(state.phase)},
                        {"round", state.round}};
  doc["reason"] = state.reason.empty() ? nlohmann::json(nullptr)
                                       : nlohmann::json(state.reason);
  return doc;
}

absl::StatusOr<SessionState> StateFromJson(const nlohmann::json& doc) {
  SessionState state;
  try {
    CAMPUSFL_ASSIGN_OR_RETURN(state.phase,
                              ParsePhase(doc.at("phase").get<std::string>()));
    state.round = doc.at("round").get<int64_t>();
    if (!doc.at("reason").is_null()) {
      state.reason = doc.at("reason").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidState",
                     e.what());
  }
  return state;
}

absl::Status SessionStateMachine::Transition(const SessionState& next) {
  if (!IsLegalTransition(current(), next)) {
    return MakeError(
        absl::StatusCode::kFailedPrecondition, "IllegalTransition",
        absl::StrCat(StateToJson(current()).dump(), " -> ",
                     StateToJson(next).dump()));
  }
  history_.push_back(next);
  return absl::OkStatus();
}

}  // namespace campusfl
