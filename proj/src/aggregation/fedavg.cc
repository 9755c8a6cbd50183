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

#include "campusfl/aggregation/fedavg.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {

absl::StatusOr<std::vector<double>> FedAvg(
    std::span<const ClientUpdate> updates) {
  if (updates.empty()) {
    return MakeError(absl::StatusCode::kInvalidArgument, "EmptyUpdateSet",
                     "no updates to aggregate");
  }
  const size_t dim = updates.front().params.size();
  const int64_t round = updates.front().round;
  std::vector<const ClientUpdate*> sorted;
  sorted.reserve(updates.size());
  for (const ClientUpdate& u : updates) {
    if (u.params.size() != dim) {
      return MakeError(absl::StatusCode::kInvalidArgument, "LengthMismatch",
                       absl::StrCat(u.client_id, " sent ", u.params.size(),
                                    " params, expected ", dim));
    }
    if (u.round != round) {
      return MakeError(absl::StatusCode::kInvalidArgument, "MixedRounds",
                       absl::StrCat(u.client_id, " is from round ", u.round,
                                    ", expected ", round));
    }
    if (u.num_examples < 1) {
      return MakeError(absl::StatusCode::kInvalidArgument, "NonPositiveWeight",
                       absl::StrCat(u.client_id, " reports ", u.num_examples,
                                    " examples"));
    }
    sorted.push_back(&u);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const ClientUpdate* a, const ClientUpdate* b) {
              return a->client_id < b->client_id;
            });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->client_id == sorted[i - 1]->client_id) {
      return MakeError(absl::StatusCode::kInvalidArgument, "DuplicateClient",
                       sorted[i]->client_id);
    }
  }

  double total = 0;
  for (const ClientUpdate* u : sorted) total += static_cast<double>(u->num_examples);
  std::vector<double> mean(dim, 0.0);
  for (const ClientUpdate* u : sorted) {
    const double weight = static_cast<double>(u->num_examples);
    for (size_t i = 0; i < dim; ++i) mean[i] += weight * u->params[i];
  }
  for (size_t i = 0; i < dim; ++i) {
    mean[i] /= total;
    // Rounding can push the mean an ulp outside the inputs' range.
    double lo = sorted.front()->params[i];
    double hi = lo;
    for (const ClientUpdate* u : sorted) {
      lo = std::min(lo, u->params[i]);
      hi = std::max(hi, u->params[i]);
    }
    mean[i] = std::clamp(mean[i], lo, hi);
  }
  return mean;
}

}  // namespace campusfl
