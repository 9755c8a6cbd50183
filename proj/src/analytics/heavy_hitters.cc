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

#include "campusfl/analytics/heavy_hitters.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "campusfl/analytics/local_dp.h"
#include "campusfl/base/status.h"

namespace campusfl {

absl::StatusOr<HeavyHitterResult> HeavyHitters(
    std::span<const PerturbedReport> reports, const FaQuery& query) {
  const auto* hh = std::get_if<HeavyHittersQuery>(&query.kind);
  if (hh == nullptr) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidQuery",
                     "not a heavy-hitters query");
  }
  CAMPUSFL_RETURN_IF_ERROR(ValidateQuery(query));
  if (reports.empty()) {
    return MakeError(absl::StatusCode::kFailedPrecondition, "NoReports", "");
  }
  const int buckets = hh->buckets.num_buckets();

  // std::map orders nullopt before any label.
  std::map<std::optional<std::string>, std::vector<int64_t>> histograms;
  for (const PerturbedReport& r : reports) {
    if (r.query_id != query.query_id) {
      return MakeError(absl::StatusCode::kInvalidArgument, "QueryMismatch",
                       r.query_id);
    }
    const int64_t* bucket = std::get_if<int64_t>(&r.payload);
    if (bucket == nullptr || *bucket < 0 || *bucket >= buckets) {
      return MakeError(absl::StatusCode::kInvalidArgument, "InvalidPayload",
                       "bucket index out of range");
    }
    auto [it, inserted] = histograms.try_emplace(r.cluster);
    if (inserted) it->second.assign(static_cast<size_t>(buckets), 0);
    ++it->second[static_cast<size_t>(*bucket)];
  }

  HeavyHitterResult result;
  result.query_id = query.query_id;
  result.n_reports = static_cast<int64_t>(reports.size());
  for (const auto& [cluster, counts] : histograms) {
    const int64_t n = std::accumulate(counts.begin(), counts.end(), int64_t{0});
    CAMPUSFL_ASSIGN_OR_RETURN(std::vector<double> estimate,
                              DebiasHistogram(counts, n, buckets, hh->epsilon));
    std::vector<int> order(static_cast<size_t>(buckets));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&estimate](int a, int b) {
      return estimate[static_cast<size_t>(a)] > estimate[static_cast<size_t>(b)];
    });
    ClusterTopK top{cluster, n, {}};
    for (int i = 0; i < hh->k; ++i) {
      const int b = order[static_cast<size_t>(i)];
      top.top.push_back({b, estimate[static_cast<size_t>(b)]});
    }
    result.per_cluster.push_back(std::move(top));
  }
  return result;
}

}  // namespace campusfl
