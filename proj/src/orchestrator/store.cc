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

#include "campusfl/orchestrator/store.h"

#include <filesystem>
#include <memory>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {

namespace fs = std::filesystem;

const char* Store::FileName(Log log) {
  switch (log) {
    case Log::kRegistry:
      return "registry.jsonl";
    case Log::kSessions:
      return "sessions.jsonl";
    case Log::kRounds:
      return "rounds.jsonl";
    case Log::kFaResults:
      return "fa_results.jsonl";
  }
  return "";
}

absl::StatusOr<std::unique_ptr<Store>> Store::Open(const std::string& dir) {
  std::unique_ptr<Store> store(new Store(dir));
  if (dir.empty()) return store;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return MakeError(absl::StatusCode::kInternal, "StorageError",
                     absl::StrCat(dir, ": ", ec.message()));
  }
  for (Log log : {Log::kRegistry, Log::kSessions, Log::kRounds,
                  Log::kFaResults}) {
    const fs::path path = fs::path(dir) / FileName(log);
    std::ofstream& out = store->files_[static_cast<int>(log)];
    out.open(path, std::ios::app | std::ios::binary);
    if (!out) {
      return MakeError(absl::StatusCode::kInternal, "StorageError",
                       absl::StrCat("cannot open ", path.string()));
    }
  }
  return store;
}

absl::Status Store::Append(Log log, const nlohmann::json& record) {
  if (dir_.empty()) return absl::OkStatus();
  const std::string line = record.dump() + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream& out = files_[static_cast<int>(log)];
  out << line;
  out.flush();
  if (!out) {
    return MakeError(absl::StatusCode::kInternal, "StorageError",
                     absl::StrCat("write to ", FileName(log), " failed"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<nlohmann::json>> ReadJsonLines(
    const std::string& path) {
  std::vector<nlohmann::json> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  const std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  const std::string name = fs::path(path).filename().string();
  size_t start = 0;
  int line_no = 0;
  while (start < content.size()) {
    ++line_no;
    const size_t end = content.find('\n', start);
    if (end == std::string::npos) {
      return MakeError(absl::StatusCode::kDataLoss, "StorageCorrupt",
                       absl::StrCat(name, ":", line_no, ": unterminated line"));
    }
    const std::string line = content.substr(start, end - start);
    start = end + 1;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      return MakeError(absl::StatusCode::kDataLoss, "StorageCorrupt",
                       absl::StrCat(name, ":", line_no, ": ", e.what()));
    }
    if (!records.back().is_object()) {
      return MakeError(absl::StatusCode::kDataLoss, "StorageCorrupt",
                       absl::StrCat(name, ":", line_no, ": not an object"));
    }
  }
  return records;
}

absl::StatusOr<Store::Contents> Store::ReadAll() const {
  Contents contents;
  if (dir_.empty()) return contents;
  auto read = [this](Log log) {
    return ReadJsonLines((fs::path(dir_) / FileName(log)).string());
  };
  CAMPUSFL_ASSIGN_OR_RETURN(contents.registry, read(Log::kRegistry));
  CAMPUSFL_ASSIGN_OR_RETURN(contents.sessions, read(Log::kSessions));
  CAMPUSFL_ASSIGN_OR_RETURN(contents.rounds, read(Log::kRounds));
  CAMPUSFL_ASSIGN_OR_RETURN(contents.fa_results, read(Log::kFaResults));
  return contents;
}

}  // namespace campusfl
