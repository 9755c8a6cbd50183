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

#ifndef CAMPUSFL_ANALYTICS_LOCAL_DP_H_
#define CAMPUSFL_ANALYTICS_LOCAL_DP_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/analytics/fa_query.h"
#include "campusfl/base/random.h"

namespace campusfl {

// Index of the half-open bucket holding `value`. With clamping, values below
// the first edge map to 0 and values at or above the last edge to B-1.
// Errors: OutOfDomain (unclamped out-of-range value, or NaN).
absl::StatusOr<int> Bucketize(double value, const BucketSpec& spec);

// k-ary randomized response over B categories:
//   p = e^eps / (e^eps + B - 1), q = 1 / (e^eps + B - 1).
struct KrrProbabilities {
  double keep;   // p
  double other;  // q, for each of the B-1 other categories
};
KrrProbabilities KrrProbabilitiesFor(int num_buckets, double epsilon);

// Reports `true_bucket` with probability p, else a uniform other bucket.
int KrrPerturb(int true_bucket, int num_buckets, double epsilon, Rng& rng);

// Unbiased frequency estimate n_v = (c_v - n q) / (p - q). Estimates may be
// negative and sum to n.
// Errors: InvalidHistogram (size or total mismatch), DegenerateBudget.
absl::StatusOr<std::vector<double>> DebiasHistogram(
    std::span<const int64_t> observed, int64_t n, int num_buckets,
    double epsilon);

// Laplace(0, scale) draw.
double SampleLaplace(double scale, Rng& rng);

// Central form: (sum of clipped values + Laplace((hi-lo)/eps)) / n.
// Errors: EmptyInput.
absl::StatusOr<double> DpMean(std::span<const double> values,
                              const DpMeanQuery& query, Rng& rng);

// Client form: one clipped value plus its own Laplace((hi-lo)/eps) noise.
double LocalDpMeanContribution(double value, const DpMeanQuery& query,
                               Rng& rng);

// Server side of the client form: plain mean of the noised contributions.
// Errors: NoReports, QueryMismatch, InvalidPayload.
absl::StatusOr<DpMeanResult> AggregateDpMean(
    std::span<const PerturbedReport> reports, const FaQuery& query);

}  // namespace campusfl

#endif  // CAMPUSFL_ANALYTICS_LOCAL_DP_H_
