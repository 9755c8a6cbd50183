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

#include "campusfl/analytics/local_dp.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {

absl::StatusOr<int> Bucketize(double value, const BucketSpec& spec) {
  const int buckets = spec.num_buckets();
  if (std::isnan(value)) {
    return MakeError(absl::StatusCode::kOutOfRange, "OutOfDomain", "NaN");
  }
  if (value < spec.edges.front() || value >= spec.edges.back()) {
    if (!spec.clamp) {
      return MakeError(absl::StatusCode::kOutOfRange, "OutOfDomain",
                       absl::StrCat(value, " outside [", spec.edges.front(),
                                    ", ", spec.edges.back(), ")"));
    }
    return value < spec.edges.front() ? 0 : buckets - 1;
  }
  // First edge strictly greater than value closes the bucket.
  auto it = std::upper_bound(spec.edges.begin(), spec.edges.end(), value);
  return static_cast<int>(it - spec.edges.begin()) - 1;
}

KrrProbabilities KrrProbabilitiesFor(int num_buckets, double epsilon) {
  const double others = static_cast<double>(num_buckets - 1);
  // Written in terms of e^-eps so that large budgets do not overflow.
  const double shrink = std::exp(-epsilon);
  const double denom = 1.0 + others * shrink;
  return {1.0 / denom, shrink / denom};
}

int KrrPerturb(int true_bucket, int num_buckets, double epsilon, Rng& rng) {
  const KrrProbabilities probs = KrrProbabilitiesFor(num_buckets, epsilon);
  if (UniformUnit(rng) < probs.keep) return true_bucket;
  const int other = static_cast<int>(
      UniformIndex(rng, static_cast<uint64_t>(num_buckets - 1)));
  return other < true_bucket ? other : other + 1;
}

absl::StatusOr<std::vector<double>> DebiasHistogram(
    std::span<const int64_t> observed, int64_t n, int num_buckets,
    double epsilon) {
  if (n < 1 || static_cast<int>(observed.size()) != num_buckets) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidHistogram",
                     absl::StrCat(observed.size(), " counts for ", num_buckets,
                                  " buckets, n=", n));
  }
  const int64_t total = std::accumulate(observed.begin(), observed.end(),
                                        int64_t{0});
  if (total != n) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidHistogram",
                     absl::StrCat("counts sum to ", total, ", n=", n));
  }
  const KrrProbabilities probs = KrrProbabilitiesFor(num_buckets, epsilon);
  const double gap = probs.keep - probs.other;
  if (!(gap > 0)) {
    return MakeError(absl::StatusCode::kInvalidArgument, "DegenerateBudget",
                     "p == q");
  }
  const double baseline = static_cast<double>(n) * probs.other;
  std::vector<double> estimate(observed.size());
  for (size_t v = 0; v < observed.size(); ++v) {
    estimate[v] = (static_cast<double>(observed[v]) - baseline) / gap;
  }
  return estimate;
}

double SampleLaplace(double scale, Rng& rng) {
  std::exponential_distribution<double> exp(1.0 / scale);
  return exp(rng) - exp(rng);
}

absl::StatusOr<double> DpMean(std::span<const double> values,
                              const DpMeanQuery& query, Rng& rng) {
  if (values.empty()) {
    return MakeError(absl::StatusCode::kInvalidArgument, "EmptyInput",
                     "no values");
  }
  double sum = 0;
  for (double v : values) sum += std::clamp(v, query.clip_lo, query.clip_hi);
  sum += SampleLaplace((query.clip_hi - query.clip_lo) / query.epsilon, rng);
  return sum / static_cast<double>(values.size());
}

double LocalDpMeanContribution(double value, const DpMeanQuery& query,
                               Rng& rng) {
  return std::clamp(value, query.clip_lo, query.clip_hi) +
         SampleLaplace((query.clip_hi - query.clip_lo) / query.epsilon, rng);
}

absl::StatusOr<DpMeanResult> AggregateDpMean(
    std::span<const PerturbedReport> reports, const FaQuery& query) {
  if (reports.empty()) {
    return MakeError(absl::StatusCode::kFailedPrecondition, "NoReports", "");
  }
  double sum = 0;
  for (const PerturbedReport& r : reports) {
    if (r.query_id != query.query_id) {
      return MakeError(absl::StatusCode::kInvalidArgument, "QueryMismatch",
                       r.query_id);
    }
    const double* value = std::get_if<double>(&r.payload);
    if (value == nullptr || !std::isfinite(*value)) {
      return MakeError(absl::StatusCode::kInvalidArgument, "InvalidPayload",
                       "dp_mean reports carry a finite real");
    }
    sum += *value;
  }
  return DpMeanResult{query.query_id, sum / static_cast<double>(reports.size()),
                      static_cast<int64_t>(reports.size())};
}

}  // namespace campusfl
