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

#ifndef CAMPUSFL_ORCHESTRATOR_STORE_H_
#define CAMPUSFL_ORCHESTRATOR_STORE_H_

#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace campusfl {

// Append-only JSON-lines files under one directory:
//   registry.jsonl, sessions.jsonl, rounds.jsonl, fa_results.jsonl
// An empty directory path disables persistence.
class Store {
 public:
  enum class Log { kRegistry, kSessions, kRounds, kFaResults };

  // Creates the directory if needed. Errors: StorageError.
  static absl::StatusOr<std::unique_ptr<Store>> Open(const std::string& dir);

  absl::Status Append(Log log, const nlohmann::json& record);

  struct Contents {
    std::vector<nlohmann::json> registry;
    std::vector<nlohmann::json> sessions;
    std::vector<nlohmann::json> rounds;
    std::vector<nlohmann::json> fa_results;
  };

  // Reads every log. A malformed or unterminated line aborts with
  // StorageCorrupt naming the file and 1-based line number.
  absl::StatusOr<Contents> ReadAll() const;

  static const char* FileName(Log log);
  const std::string& dir() const { return dir_; }

 private:
  explicit Store(std::string dir) : dir_(std::move(dir)) {}

  std::string dir_;
  std::mutex mu_;
  std::ofstream files_[4];
};

// Reads one log file. Exposed for the inspect command.
absl::StatusOr<std::vector<nlohmann::json>> ReadJsonLines(
    const std::string& path);

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_STORE_H_
