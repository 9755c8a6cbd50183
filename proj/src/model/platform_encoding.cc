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

#include "campusfl/model/platform_encoding.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

Tensor SliceLayer(const CanonicalModel& model, const LayerSpec& layer) {
  Tensor t;
  t.shape = layer.shape;
  const auto first = model.params.begin() + static_cast<ptrdiff_t>(layer.offset);
  t.values.assign(first, first + static_cast<ptrdiff_t>(layer.len));
  return t;
}

absl::Status PlaceTensor(const Tensor& tensor, const LayerSpec& layer,
                         std::vector<double>& out) {
  if (tensor.shape != layer.shape || tensor.values.size() != layer.len) {
    return MakeError(
        absl::StatusCode::kInvalidArgument, "ShapeMismatch",
        absl::StrCat(layer.name, ": got [", absl::StrJoin(tensor.shape, ","),
                     "] with ", tensor.values.size(), " values, expected [",
                     absl::StrJoin(layer.shape, ","), "]"));
  }
  std::copy(tensor.values.begin(), tensor.values.end(),
            out.begin() + static_cast<ptrdiff_t>(layer.offset));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> DecodeNameKeyed(
    const NameKeyedPayload& payload, const ModelSpec& spec) {
  std::vector<double> out(spec.ParameterCount());
  for (const LayerSpec& layer : spec.layers) {
    auto it = payload.find(layer.name);
    if (it == payload.end()) {
      return MakeError(absl::StatusCode::kNotFound, "MissingLayer", layer.name);
    }
    CAMPUSFL_RETURN_IF_ERROR(PlaceTensor(it->second, layer, out));
  }
  if (payload.size() != spec.layers.size()) {
    // Every spec layer was found, so the extras are unknown names. Report the
    // lexicographically smallest so the error is deterministic.
    std::vector<std::string> extras;
    for (const auto& [name, tensor] : payload) {
      bool known = std::any_of(
          spec.layers.begin(), spec.layers.end(),
          [&name = name](const LayerSpec& l) { return l.name == name; });
      if (!known) extras.push_back(name);
    }
    std::sort(extras.begin(), extras.end());
    return MakeError(absl::StatusCode::kInvalidArgument, "UnknownLayer",
                     extras.empty() ? "" : extras.front());
  }
  return out;
}

absl::StatusOr<std::vector<double>> DecodeIndexKeyed(
    const IndexKeyedPayload& payload, const ModelSpec& spec) {
  const int64_t n = static_cast<int64_t>(spec.layers.size());
  std::vector<double> out(spec.ParameterCount());
  std::vector<bool> seen(spec.layers.size(), false);
  for (const auto& [index, tensor] : payload) {
    if (index < 0 || index >= n) {
      return MakeError(absl::StatusCode::kInvalidArgument, "UnknownLayer",
                       absl::StrCat("index ", index));
    }
    if (seen[static_cast<size_t>(index)]) {
      return MakeError(absl::StatusCode::kInvalidArgument, "DuplicateLayer",
                       absl::StrCat("index ", index));
    }
    seen[static_cast<size_t>(index)] = true;
    CAMPUSFL_RETURN_IF_ERROR(
        PlaceTensor(tensor, spec.layers[static_cast<size_t>(index)], out));
  }
  for (size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      return MakeError(absl::StatusCode::kNotFound, "MissingLayer",
                       spec.layers[i].name);
    }
  }
  return out;
}

}  // namespace

std::string_view PlatformName(Platform platform) {
  return platform == Platform::kNameKeyed ? "NameKeyed" : "IndexKeyed";
}

absl::StatusOr<Platform> ParsePlatform(std::string_view name) {
  if (name == "NameKeyed") return Platform::kNameKeyed;
  if (name == "IndexKeyed") return Platform::kIndexKeyed;
  return MakeError(absl::StatusCode::kInvalidArgument, "UnknownPlatform",
                   std::string(name));
}

PlatformEncoding EncodeForPlatform(const CanonicalModel& model,
                                   Platform platform) {
  PlatformEncoding encoding;
  encoding.platform = platform;
  if (platform == Platform::kNameKeyed) {
    NameKeyedPayload payload;
    for (const LayerSpec& layer : model.spec.layers) {
      payload.emplace(layer.name, SliceLayer(model, layer));
    }
    encoding.payload = std::move(payload);
  } else {
    IndexKeyedPayload payload;
    for (size_t i = 0; i < model.spec.layers.size(); ++i) {
      payload.emplace_back(static_cast<int64_t>(i),
                           SliceLayer(model, model.spec.layers[i]));
    }
    encoding.payload = std::move(payload);
  }
  return encoding;
}

absl::StatusOr<std::vector<double>> DecodeFromPlatform(
    const PlatformEncoding& encoding, const ModelSpec& spec) {
  if (const auto* named = std::get_if<NameKeyedPayload>(&encoding.payload)) {
    return DecodeNameKeyed(*named, spec);
  }
  return DecodeIndexKeyed(std::get<IndexKeyedPayload>(encoding.payload), spec);
}

}  // namespace campusfl
