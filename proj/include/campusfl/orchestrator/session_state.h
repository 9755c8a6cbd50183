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

#ifndef CAMPUSFL_ORCHESTRATOR_SESSION_STATE_H_
#define CAMPUSFL_ORCHESTRATOR_SESSION_STATE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace campusfl {

enum class Phase {
  kCreated,
  kWaitingForClients,
  kInRound,
  kAggregating,
  kCompleted,
  kFailed,
};

std::string_view PhaseName(Phase phase);
// Errors: InvalidState.
absl::StatusOr<Phase> ParsePhase(std::string_view name);

struct SessionState {
  Phase phase = Phase::kCreated;
  // Meaningful for InRound and Aggregating.
  int64_t round = 0;
  // Meaningful for Failed: InsufficientClients, Stopped, Interrupted, ...
  std::string reason;

  bool terminal() const {
    return phase == Phase::kCompleted || phase == Phase::kFailed;
  }

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

SessionState Failed(std::string reason);

// Created -> WaitingForClients -> InRound{1} -> Aggregating{1} ->
// InRound{2} ... -> Completed, and any non-terminal state -> Failed.
bool IsLegalTransition(const SessionState& from, const SessionState& to);

nlohmann::json StateToJson(const SessionState& state);
absl::StatusOr<SessionState> StateFromJson(const nlohmann::json& doc);

// Enforces legality and keeps the full trace.
class SessionStateMachine {
 public:
  const SessionState& current() const { return history_.back(); }
  const std::vector<SessionState>& history() const { return history_; }

  // Errors: IllegalTransition.
  absl::Status Transition(const SessionState& next);

 private:
  std::vector<SessionState> history_ = {SessionState{}};
};

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_SESSION_STATE_H_
