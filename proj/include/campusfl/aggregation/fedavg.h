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

#ifndef CAMPUSFL_AGGREGATION_FEDAVG_H_
#define CAMPUSFL_AGGREGATION_FEDAVG_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/model/platform_encoding.h"

namespace campusfl {

// One client's trained parameters for one round, already decoded into
// canonical layer order.
struct ClientUpdate {
  std::string client_id;
  int64_t round = 1;
  std::vector<double> params;
  int64_t num_examples = 1;
  Platform platform = Platform::kNameKeyed;
};

// Example-count weighted coordinate mean. Updates are summed in ascending
// client_id order, so the result does not depend on arrival order.
//
// Errors: EmptyUpdateSet, LengthMismatch, MixedRounds, DuplicateClient,
// NonPositiveWeight.
absl::StatusOr<std::vector<double>> FedAvg(
    std::span<const ClientUpdate> updates);

}  // namespace campusfl

#endif  // CAMPUSFL_AGGREGATION_FEDAVG_H_
