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

#include "campusfl/orchestrator/registry.h"

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {

using nlohmann::json;

json RegistryEntryToJson(const RegistryEntry& entry) {
  return {{"model", ModelToJson(entry.model)},
          {"uploaded_at", entry.uploaded_at},
          {"status", entry.status == ModelStatus::kActive ? "Active" : "Retired"},
          {"source", entry.source}};
}

json RegistryEntrySummary(const RegistryEntry& entry) {
  return {{"model_id", entry.model_id()},
          {"version", entry.version()},
          {"arch", ArchitectureToJson(entry.model.spec.arch)},
          {"n_params", entry.model.params.size()},
          {"uploaded_at", entry.uploaded_at},
          {"status", entry.status == ModelStatus::kActive ? "Active" : "Retired"}};
}

absl::StatusOr<RegistryEntry> RegistryEntryFromJson(const json& doc) {
  RegistryEntry entry;
  try {
    CAMPUSFL_ASSIGN_OR_RETURN(entry.model, ModelFromJson(doc.at("model")));
    entry.uploaded_at = doc.at("uploaded_at").get<int64_t>();
    const std::string status = doc.at("status").get<std::string>();
    if (status != "Active" && status != "Retired") {
      return MakeError(absl::StatusCode::kInvalidArgument, "InvalidModel",
                       absl::StrCat("status '", status, "'"));
    }
    entry.status =
        status == "Active" ? ModelStatus::kActive : ModelStatus::kRetired;
    entry.source = doc.at("source").get<std::string>();
  } catch (const json::exception& e) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidModel",
                     e.what());
  }
  return entry;
}

absl::StatusOr<ModelRegistry::Registered> ModelRegistry::Register(
    std::string_view document, int64_t now) {
  CAMPUSFL_ASSIGN_OR_RETURN(CanonicalModel model,
                            ParseAndValidateModel(document));
  std::vector<RegistryEntry>& versions = models_[model.spec.model_id];
  for (const RegistryEntry& existing : versions) {
    if (existing.source == document) return Registered{existing, true};
  }
  model.spec.version = static_cast<int64_t>(versions.size()) + 1;
  RegistryEntry entry{std::move(model), now, ModelStatus::kActive,
                      std::string(document)};
  versions.push_back(entry);
  return Registered{std::move(entry), false};
}

absl::Status ModelRegistry::Restore(RegistryEntry entry) {
  std::vector<RegistryEntry>& versions = models_[entry.model_id()];
  if (entry.version() != static_cast<int64_t>(versions.size()) + 1) {
    return MakeError(absl::StatusCode::kDataLoss, "StorageCorrupt",
                     absl::StrCat(entry.model_id(), " version ",
                                  entry.version(), " follows ",
                                  versions.size()));
  }
  versions.push_back(std::move(entry));
  return absl::OkStatus();
}

absl::StatusOr<RegistryEntry> ModelRegistry::Get(const std::string& model_id,
                                                 int64_t version) const {
  auto it = models_.find(model_id);
  if (it != models_.end()) {
    const std::vector<RegistryEntry>& versions = it->second;
    if (version == 0) {
      for (auto v = versions.rbegin(); v != versions.rend(); ++v) {
        if (v->status == ModelStatus::kActive) return *v;
      }
    } else if (version >= 1 &&
               version <= static_cast<int64_t>(versions.size())) {
      return versions[static_cast<size_t>(version - 1)];
    }
  }
  return MakeError(absl::StatusCode::kNotFound, "UnknownModel",
                   absl::StrCat(model_id, " v", version));
}

std::vector<RegistryEntry> ModelRegistry::List() const {
  std::vector<RegistryEntry> all;
  for (const auto& [id, versions] : models_) {
    all.insert(all.end(), versions.begin(), versions.end());
  }
  return all;
}

}  // namespace campusfl
