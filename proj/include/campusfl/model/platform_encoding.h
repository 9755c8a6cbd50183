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

#ifndef CAMPUSFL_MODEL_PLATFORM_ENCODING_H_
#define CAMPUSFL_MODEL_PLATFORM_ENCODING_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/model/canonical_model.h"

namespace campusfl {

// Client runtimes differ in how they expose parameters: one as a map keyed by
// tensor name, the other only by tensor position.
enum class Platform { kNameKeyed, kIndexKeyed };

std::string_view PlatformName(Platform platform);
absl::StatusOr<Platform> ParsePlatform(std::string_view name);

struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> values;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

using NameKeyedPayload = std::unordered_map<std::string, Tensor>;
using IndexKeyedPayload = std::vector<std::pair<int64_t, Tensor>>;

struct PlatformEncoding {
  Platform platform = Platform::kNameKeyed;
  std::variant<NameKeyedPayload, IndexKeyedPayload> payload;

  friend bool operator==(const PlatformEncoding&,
                         const PlatformEncoding&) = default;
};

// The model must already satisfy ValidateModel.
PlatformEncoding EncodeForPlatform(const CanonicalModel& model,
                                   Platform platform);

// Inverse of EncodeForPlatform. Name-keyed decoding matches by name and is
// insensitive to map order; index-keyed decoding places tensors by index.
// Errors: MissingLayer, UnknownLayer, DuplicateLayer, ShapeMismatch.
absl::StatusOr<std::vector<double>> DecodeFromPlatform(
    const PlatformEncoding& encoding, const ModelSpec& spec);

}  // namespace campusfl

#endif  // CAMPUSFL_MODEL_PLATFORM_ENCODING_H_
