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

#ifndef CAMPUSFL_MODEL_CANONICAL_MODEL_H_
#define CAMPUSFL_MODEL_CANONICAL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace campusfl {

// Closed set of architectures a client runtime knows how to train.
struct Architecture {
  enum class Kind { kLinear, kMlp };

  Kind kind = Kind::kLinear;
  int hidden = 0;  // Mlp only.

  static Architecture Linear() { return {Kind::kLinear, 0}; }
  static Architecture Mlp(int hidden) { return {Kind::kMlp, hidden}; }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

std::string ArchitectureName(const Architecture& arch);

struct LayerSpec {
  std::string name;
  std::vector<int64_t> shape;
  size_t offset = 0;
  size_t len = 0;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// A model without its parameter values: what a client needs to lay out,
// encode and decode a parameter vector.
struct ModelSpec {
  std::string model_id;
  int64_t version = 1;
  Architecture arch;
  std::vector<LayerSpec> layers;

  // Builds a spec with offsets and lengths derived from the shapes.
  static ModelSpec Build(
      std::string model_id, int64_t version, Architecture arch,
      const std::vector<std::pair<std::string, std::vector<int64_t>>>& layers);

  // Sum of layer lengths.
  size_t ParameterCount() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// The uniform, platform-independent parameter representation used by the
// server for aggregation.
struct CanonicalModel {
  ModelSpec spec;
  std::vector<double> params;

  friend bool operator==(const CanonicalModel&, const CanonicalModel&) =
      default;
};

struct ModelViolation {
  enum class Kind {
    kEmptyModel,
    kEmptyName,
    kDuplicateName,
    kBadShape,
    kNonContiguous,
    kLengthMismatch,
    kBadVersion,
    kBadArchitecture,
  };
  Kind kind;
  std::string detail;
};

std::string_view ViolationName(ModelViolation::Kind kind);

// Returns every invariant violation; an empty result means the model is valid.
std::vector<ModelViolation> ValidateModel(const CanonicalModel& model);
std::vector<ModelViolation> ValidateSpec(const ModelSpec& spec);

// Canonical JSON document: {model_id, version, arch, layers:[{name, shape}],
// params}. Offsets are derived on parse, never stored.
nlohmann::json ModelToJson(const CanonicalModel& model);
nlohmann::json SpecToJson(const ModelSpec& spec);
nlohmann::json ArchitectureToJson(const Architecture& arch);

// Structural parse only; callers run ValidateModel on the result. Errors carry
// kind "InvalidModel".
absl::StatusOr<CanonicalModel> ModelFromJson(const nlohmann::json& doc);
absl::StatusOr<ModelSpec> SpecFromJson(const nlohmann::json& doc);
absl::StatusOr<Architecture> ArchitectureFromJson(const nlohmann::json& doc);

// Parses text, then validates. Any failure is kind "InvalidModel" with every
// violation listed in the message.
absl::StatusOr<CanonicalModel> ParseAndValidateModel(std::string_view text);

}  // namespace campusfl

#endif  // CAMPUSFL_MODEL_CANONICAL_MODEL_H_
