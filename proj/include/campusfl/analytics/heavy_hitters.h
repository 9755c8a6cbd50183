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

#ifndef CAMPUSFL_ANALYTICS_HEAVY_HITTERS_H_
#define CAMPUSFL_ANALYTICS_HEAVY_HITTERS_H_

#include <span>

#include "absl/status/statusor.h"
#include "campusfl/analytics/fa_query.h"

namespace campusfl {

// Groups randomized bucket reports by cluster label, debiases each cluster's
// histogram and keeps the k largest estimates (ties to the lower bucket).
// Clusters are ordered unlabeled first, then by label.
//
// Errors: NoReports, QueryMismatch, InvalidPayload, InvalidQuery.
absl::StatusOr<HeavyHitterResult> HeavyHitters(
    std::span<const PerturbedReport> reports, const FaQuery& query);

}  // namespace campusfl

#endif  // CAMPUSFL_ANALYTICS_HEAVY_HITTERS_H_
