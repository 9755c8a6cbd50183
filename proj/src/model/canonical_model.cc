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

#include "campusfl/model/canonical_model.h"

#include <cmath>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

using nlohmann::json;

absl::Status Invalid(const std::string& detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidModel", detail);
}

bool IsInteger(const json& j) {
  return j.is_number_integer() || j.is_number_unsigned();
}

}  // namespace

std::string ArchitectureName(const Architecture& arch) {
  switch (arch.kind) {
    case Architecture::Kind::kLinear:
      return "linear";
    case Architecture::Kind::kMlp:
      return absl::StrCat("mlp(", arch.hidden, ")");
  }
  return "unknown";
}

ModelSpec ModelSpec::Build(
    std::string model_id, int64_t version, Architecture arch,
    const std::vector<std::pair<std::string, std::vector<int64_t>>>& layers) {
  ModelSpec spec;
  spec.model_id = std::move(model_id);
  spec.version = version;
  spec.arch = arch;
  size_t offset = 0;
  for (const auto& [name, shape] : layers) {
    size_t len = 1;
    for (int64_t d : shape) len *= static_cast<size_t>(d < 0 ? 0 : d);
    spec.layers.push_back({name, shape, offset, len});
    offset += len;
  }
  return spec;
}

size_t ModelSpec::ParameterCount() const {
  size_t total = 0;
  for (const LayerSpec& layer : layers) total += layer.len;
  return total;
}

std::string_view ViolationName(ModelViolation::Kind kind) {
  switch (kind) {
    case ModelViolation::Kind::kEmptyModel:
      return "EmptyModel";
    case ModelViolation::Kind::kEmptyName:
      return "EmptyName";
    case ModelViolation::Kind::kDuplicateName:
      return "DuplicateName";
    case ModelViolation::Kind::kBadShape:
      return "BadShape";
    case ModelViolation::Kind::kNonContiguous:
      return "NonContiguous";
    case ModelViolation::Kind::kLengthMismatch:
      return "LengthMismatch";
    case ModelViolation::Kind::kBadVersion:
      return "BadVersion";
    case ModelViolation::Kind::kBadArchitecture:
      return "BadArchitecture";
  }
  return "Unknown";
}

std::vector<ModelViolation> ValidateSpec(const ModelSpec& spec) {
  using Kind = ModelViolation::Kind;
  std::vector<ModelViolation> out;
  if (spec.version < 1) {
    out.push_back({Kind::kBadVersion, absl::StrCat("version ", spec.version)});
  }
  if (spec.arch.kind == Architecture::Kind::kMlp && spec.arch.hidden < 1) {
    out.push_back({Kind::kBadArchitecture,
                   absl::StrCat("mlp hidden width ", spec.arch.hidden)});
  }
  if (spec.layers.empty()) {
    out.push_back({Kind::kEmptyModel, "model has no layers"});
    return out;
  }
  std::set<std::string> names;
  size_t expected_offset = 0;
  for (const LayerSpec& layer : spec.layers) {
    if (layer.name.empty()) {
      out.push_back({Kind::kEmptyName, "layer with empty name"});
    } else if (!names.insert(layer.name).second) {
      out.push_back({Kind::kDuplicateName, layer.name});
    }
    size_t product = 1;
    bool shape_ok = !layer.shape.empty();
    for (int64_t d : layer.shape) {
      if (d < 1) {
        shape_ok = false;
        break;
      }
      product *= static_cast<size_t>(d);
    }
    if (!shape_ok) {
      out.push_back({Kind::kBadShape,
                     absl::StrCat(layer.name, " shape [",
                                  absl::StrJoin(layer.shape, ","), "]")});
    } else if (product != layer.len) {
      out.push_back({Kind::kBadShape,
                     absl::StrCat(layer.name, " len ", layer.len,
                                  " != product of shape ", product)});
    }
    if (layer.offset != expected_offset) {
      out.push_back({Kind::kNonContiguous,
                     absl::StrCat(layer.name, " offset ", layer.offset,
                                  ", expected ", expected_offset)});
    }
    expected_offset = layer.offset + layer.len;
  }
  return out;
}

std::vector<ModelViolation> ValidateModel(const CanonicalModel& model) {
  std::vector<ModelViolation> out = ValidateSpec(model.spec);
  const size_t expected = model.spec.ParameterCount();
  if (!model.spec.layers.empty() && model.params.size() != expected) {
    out.push_back({ModelViolation::Kind::kLengthMismatch,
                   absl::StrCat("params length ", model.params.size(),
                                ", layers total ", expected)});
  }
  return out;
}

json ArchitectureToJson(const Architecture& arch) {
  if (arch.kind == Architecture::Kind::kMlp) {
    return json{{"kind", "mlp"}, {"hidden", arch.hidden}};
  }
  return json{{"kind", "linear"}};
}

json SpecToJson(const ModelSpec& spec) {
  json layers = json::array();
  for (const LayerSpec& layer : spec.layers) {
    layers.push_back(json{{"name", layer.name}, {"shape", layer.shape}});
  }
  return json{{"model_id", spec.model_id},
              {"version", spec.version},
              {"arch", ArchitectureToJson(spec.arch)},
              {"layers", std::move(layers)}};
}

json ModelToJson(const CanonicalModel& model) {
  json doc = SpecToJson(model.spec);
  doc["params"] = model.params;
  return doc;
}

absl::StatusOr<Architecture> ArchitectureFromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    return Invalid("arch must be an object with a string kind");
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "linear") {
    if (doc.size() != 1) return Invalid("linear arch takes no fields");
    return Architecture::Linear();
  }
  if (kind == "mlp") {
    if (doc.size() != 2 || !doc.contains("hidden") || !IsInteger(doc["hidden"])) {
      return Invalid("mlp arch requires integer hidden");
    }
    return Architecture::Mlp(doc["hidden"].get<int>());
  }
  return Invalid(absl::StrCat("unknown arch kind '", kind, "'"));
}

absl::StatusOr<ModelSpec> SpecFromJson(const json& doc) {
  if (!doc.is_object()) return Invalid("model document must be an object");
  if (!doc.contains("model_id") || !doc["model_id"].is_string()) {
    return Invalid("model_id must be a string");
  }
  if (!doc.contains("version") || !IsInteger(doc["version"])) {
    return Invalid("version must be an integer");
  }
  if (!doc.contains("arch")) return Invalid("missing arch");
  if (!doc.contains("layers") || !doc["layers"].is_array()) {
    return Invalid("layers must be an array");
  }
  CAMPUSFL_ASSIGN_OR_RETURN(Architecture arch,
                            ArchitectureFromJson(doc["arch"]));
  std::vector<std::pair<std::string, std::vector<int64_t>>> layers;
  for (const json& layer : doc["layers"]) {
    if (!layer.is_object() || !layer.contains("name") ||
        !layer["name"].is_string() || !layer.contains("shape") ||
        !layer["shape"].is_array() || layer.size() != 2) {
      return Invalid("each layer must be {name: string, shape: [int]}");
    }
    std::vector<int64_t> shape;
    for (const json& d : layer["shape"]) {
      if (!IsInteger(d)) return Invalid("shape entries must be integers");
      shape.push_back(d.get<int64_t>());
    }
    layers.emplace_back(layer["name"].get<std::string>(), std::move(shape));
  }
  return ModelSpec::Build(doc["model_id"].get<std::string>(),
                          doc["version"].get<int64_t>(), arch, layers);
}

absl::StatusOr<CanonicalModel> ModelFromJson(const json& doc) {
  CAMPUSFL_ASSIGN_OR_RETURN(ModelSpec spec, SpecFromJson(doc));
  if (!doc.contains("params") || !doc["params"].is_array()) {
    return Invalid("params must be an array");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "model_id" && key != "version" && key != "arch" &&
        key != "layers" && key != "params") {
      return Invalid(absl::StrCat("unknown field '", key, "'"));
    }
  }
  CanonicalModel model{std::move(spec), {}};
  model.params.reserve(doc["params"].size());
  for (const json& p : doc["params"]) {
    if (!p.is_number()) return Invalid("params entries must be numbers");
    const double v = p.get<double>();
    if (!std::isfinite(v)) return Invalid("params must be finite");
    model.params.push_back(v);
  }
  return model;
}

absl::StatusOr<CanonicalModel> ParseAndValidateModel(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) return Invalid("document is not valid JSON");
  CAMPUSFL_ASSIGN_OR_RETURN(CanonicalModel model, ModelFromJson(doc));
  std::vector<ModelViolation> violations = ValidateModel(model);
  if (!violations.empty()) {
    std::vector<std::string> parts;
    for (const ModelViolation& v : violations) {
      parts.push_back(absl::StrCat(std::string(ViolationName(v.kind)), "(",
                                   v.detail, ")"));
    }
    return Invalid(absl::StrJoin(parts, "; "));
  }
  return model;
}

}  // namespace campusfl
