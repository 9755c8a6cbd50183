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

#ifndef CAMPUSFL_ANALYTICS_FA_QUERY_H_
#define CAMPUSFL_ANALYTICS_FA_QUERY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace campusfl {

// B = edges.size() - 1 half-open buckets [e_i, e_{i+1}).
struct BucketSpec {
  std::vector<double> edges;
  bool clamp = true;

  int num_buckets() const { return static_cast<int>(edges.size()) - 1; }

  // Step-count default: 0..24000 in steps of 2000, clamped.
  static BucketSpec DefaultSteps();

  friend bool operator==(const BucketSpec&, const BucketSpec&) = default;
};

struct HeavyHittersQuery {
  BucketSpec buckets;
  int k = 3;
  double epsilon = 4.0;
  std::string cluster_by = "cluster";
  // Client-side statistic that gets bucketized.
  std::string attribute = "steps";

  friend bool operator==(const HeavyHittersQuery&,
                         const HeavyHittersQuery&) = default;
};

struct DpMeanQuery {
  std::string attribute = "steps";
  double clip_lo = 0;
  double clip_hi = 1;
  double epsilon = 1;

  friend bool operator==(const DpMeanQuery&, const DpMeanQuery&) = default;
};

struct FaQuery {
  std::string query_id;
  std::variant<HeavyHittersQuery, DpMeanQuery> kind;

  friend bool operator==(const FaQuery&, const FaQuery&) = default;
};

// Errors: InvalidQuery.
absl::Status ValidateBucketSpec(const BucketSpec& spec);
absl::Status ValidateQuery(const FaQuery& query);

nlohmann::json QueryToJson(const FaQuery& query);
absl::StatusOr<FaQuery> QueryFromJson(const nlohmann::json& doc);

// What a client sends back for a query. Carries no stable client identity.
struct PerturbedReport {
  std::string query_id;
  std::string pseudonym;
  // Bucket index (heavy hitters) or noised clipped value (DP mean).
  std::variant<int64_t, double> payload = int64_t{0};
  std::optional<std::string> cluster;

  friend bool operator==(const PerturbedReport&,
                         const PerturbedReport&) = default;
};

struct BucketEstimate {
  int bucket = 0;
  double estimate = 0;
};

struct ClusterTopK {
  std::optional<std::string> cluster;
  int64_t n_reports = 0;
  std::vector<BucketEstimate> top;
};

struct HeavyHitterResult {
  std::string query_id;
  std::vector<ClusterTopK> per_cluster;
  int64_t n_reports = 0;
};

struct DpMeanResult {
  std::string query_id;
  double estimate = 0;
  int64_t n_reports = 0;
};

using FaResult = std::variant<HeavyHitterResult, DpMeanResult>;

// {query_id, kind, per_cluster:[{cluster, top:[{bucket, estimate}]}], n_reports}
// for heavy hitters; {query_id, kind, estimate, n_reports} for DP means.
nlohmann::json FaResultToJson(const FaResult& result);

}  // namespace campusfl

#endif  // CAMPUSFL_ANALYTICS_FA_QUERY_H_
