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

#ifndef CAMPUSFL_ORCHESTRATOR_REGISTRY_H_
#define CAMPUSFL_ORCHESTRATOR_REGISTRY_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "campusfl/model/canonical_model.h"
#include "nlohmann/json.hpp"

namespace campusfl {

enum class ModelStatus { kActive, kRetired };

struct RegistryEntry {
  CanonicalModel model;  // model.spec.version is the assigned version
  int64_t uploaded_at = 0;
  ModelStatus status = ModelStatus::kActive;
  // Uploaded bytes, kept to recognize re-uploads.
  std::string source;

  const std::string& model_id() const { return model.spec.model_id; }
  int64_t version() const { return model.spec.version; }
};

nlohmann::json RegistryEntryToJson(const RegistryEntry& entry);
// Listing form without parameters or source.
nlohmann::json RegistryEntrySummary(const RegistryEntry& entry);
absl::StatusOr<RegistryEntry> RegistryEntryFromJson(const nlohmann::json& doc);

// Versioned model store. Not internally synchronized.
class ModelRegistry {
 public:
  struct Registered {
    RegistryEntry entry;
    bool duplicate = false;
  };

  // Validates the document and files it under the next version for its
  // model_id; the document's own version field is ignored. Re-posting bytes
  // identical to an earlier upload returns that entry unchanged.
  // Errors: InvalidModel.
  absl::StatusOr<Registered> Register(std::string_view document,
                                      int64_t now);

  // Re-inserts a persisted entry. Errors: StorageCorrupt (version gap).
  absl::Status Restore(RegistryEntry entry);

  // version 0 selects the latest active version. Errors: UnknownModel.
  absl::StatusOr<RegistryEntry> Get(const std::string& model_id,
                                    int64_t version) const;

  std::vector<RegistryEntry> List() const;

 private:
  std::map<std::string, std::vector<RegistryEntry>> models_;
};

}  // namespace campusfl

#endif  // CAMPUSFL_ORCHESTRATOR_REGISTRY_H_
