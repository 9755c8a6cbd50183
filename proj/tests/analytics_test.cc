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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "campusfl/analytics/deidentify.h"
#include "campusfl/analytics/fa_query.h"
#include "campusfl/analytics/heavy_hitters.h"
#include "campusfl/analytics/local_dp.h"
#include "campusfl/analytics/recommend.h"
#include "campusfl/base/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace campusfl {
namespace {

using ::testing::ElementsAre;

// Upper 1% points of the chi-squared distribution, from scipy.stats.chi2.ppf.
constexpr double kChi2Crit99Df4 = 13.276704135987622;
constexpr double kChi2Crit99Df9 = 21.665994333461924;

BucketSpec Edges(std::vector<double> edges, bool clamp = true) {
  return BucketSpec{std::move(edges), clamp};
}

FaQuery HitterQuery(int buckets, int k, double epsilon,
                    std::string id = "q1") {
  std::vector<double> edges(static_cast<size_t>(buckets) + 1);
  std::iota(edges.begin(), edges.end(), 0.0);
  HeavyHittersQuery hh;
  hh.buckets = Edges(edges);
  hh.k = k;
  hh.epsilon = epsilon;
  return FaQuery{std::move(id), hh};
}

PerturbedReport BucketReport(int64_t bucket,
                             std::optional<std::string> cluster = {},
                             std::string query_id = "q1") {
  return {std::move(query_id), "p", bucket, std::move(cluster)};
}

double ChiSquared(const std::vector<int64_t>& observed,
                  const std::vector<double>& expected_prob, int64_t n) {
  double stat = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_prob[i] * static_cast<double>(n);
    stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  return stat;
}

TEST(BucketizeTest, HalfOpenIntervals) {
  const BucketSpec spec = Edges({0, 2000, 4000, 6000});
  EXPECT_EQ(*Bucketize(2500, spec), 1);
  EXPECT_EQ(*Bucketize(0, spec), 0);
  EXPECT_EQ(*Bucketize(2000, spec), 1);
  EXPECT_EQ(*Bucketize(5999.999, spec), 2);
}

TEST(BucketizeTest, ClampMapsOutOfRangeToEnds) {
  const BucketSpec spec = Edges({0, 2000, 4000, 6000});
  EXPECT_EQ(*Bucketize(-5, spec), 0);
  EXPECT_EQ(*Bucketize(6000, spec), 2);
  EXPECT_EQ(*Bucketize(1e12, spec), 2);
}

TEST(BucketizeTest, UnclampedRightEdgeIsOutOfDomain) {
  const BucketSpec spec = Edges({0, 2000, 4000, 6000}, /*clamp=*/false);
  EXPECT_EQ(ErrorKind(Bucketize(6000, spec).status()), "OutOfDomain");
  EXPECT_EQ(ErrorKind(Bucketize(-1, spec).status()), "OutOfDomain");
  EXPECT_EQ(ErrorKind(Bucketize(NAN, Edges({0, 1, 2})).status()),
            "OutOfDomain");
}

TEST(KrrTest, ProbabilityRatioIsExpEpsilon) {
  for (double eps : {0.01, 0.5, 1.0, 4.0, 10.0}) {
    for (int b : {2, 5, 20, 64}) {
      const KrrProbabilities probs = KrrProbabilitiesFor(b, eps);
      EXPECT_DOUBLE_EQ(probs.keep / probs.other, std::exp(eps));
      EXPECT_NEAR(probs.keep + (b - 1) * probs.other, 1.0, 1e-15);
    }
  }
}

TEST(KrrTest, ClosedFormAtLnNine) {
  const KrrProbabilities probs = KrrProbabilitiesFor(10, std::log(9.0));
  EXPECT_NEAR(probs.keep, 0.5, 1e-15);
  EXPECT_NEAR(probs.other, 1.0 / 18, 1e-15);
}

TEST(KrrTest, LargeBudgetAlmostAlwaysKeeps) {
  Rng rng(7);
  int kept = 0;
  for (int i = 0; i < 10000; ++i) kept += KrrPerturb(3, 20, 50.0, rng) == 3;
  EXPECT_GE(kept, 9990);
}

TEST(KrrTest, DeterministicGivenSeed) {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(KrrPerturb(i % 7, 7, 1.0, a), KrrPerturb(i % 7, 7, 1.0, b));
  }
}

TEST(KrrTest, OutputDistributionPassesChiSquared) {
  constexpr int kBuckets = 5;
  constexpr int64_t kDraws = 100000;
  const double eps = 1.0;
  const KrrProbabilities probs = KrrProbabilitiesFor(kBuckets, eps);
  std::vector<double> expected(kBuckets, probs.other);
  expected[2] = probs.keep;
  Rng rng(2024);
  std::vector<int64_t> counts(kBuckets, 0);
  for (int64_t i = 0; i < kDraws; ++i) {
    ++counts[static_cast<size_t>(KrrPerturb(2, kBuckets, eps, rng))];
  }
  EXPECT_LT(ChiSquared(counts, expected, kDraws), kChi2Crit99Df4);
}

TEST(KrrTest, TinyBudgetIsNearlyUniform) {
  constexpr int kBuckets = 10;
  constexpr int64_t kDraws = 100000;
  Rng rng(5);
  std::vector<int64_t> counts(kBuckets, 0);
  for (int64_t i = 0; i < kDraws; ++i) {
    ++counts[static_cast<size_t>(KrrPerturb(0, kBuckets, 1e-9, rng))];
  }
  const std::vector<double> uniform(kBuckets, 1.0 / kBuckets);
  EXPECT_LT(ChiSquared(counts, uniform, kDraws), kChi2Crit99Df9);
}

TEST(DebiasTest, HandComputedEstimate) {
  // p = 1/2, q = 1/18, n q = 100, p - q = 4/9: (200 - 100) * 9/4 = 225.
  std::vector<int64_t> observed = {200, 400, 200, 200, 200,
                                   200, 100, 100, 100, 100};
  auto estimate = DebiasHistogram(observed, 1800, 10, std::log(9.0));
  ASSERT_TRUE(estimate.ok()) << estimate.status();
  EXPECT_NEAR((*estimate)[0], 225.0, 1e-9);
  EXPECT_NEAR((*estimate)[1], 675.0, 1e-9);
  EXPECT_NEAR((*estimate)[9], 0.0, 1e-9);
}

TEST(DebiasTest, LargeBudgetIsIdentity) {
  std::vector<int64_t> observed = {5, 0, 17, 3, 0, 75};
  auto estimate = DebiasHistogram(observed, 100, 6, 50.0);
  ASSERT_TRUE(estimate.ok());
  for (size_t i = 0; i < observed.size(); ++i) {
    EXPECT_NEAR((*estimate)[i], static_cast<double>(observed[i]), 1e-6);
  }
}

TEST(DebiasTest, SingleBucketConcentration) {
  std::vector<int64_t> observed = {0, 0, 400, 0};
  auto estimate = DebiasHistogram(observed, 400, 4, 40.0);
  ASSERT_TRUE(estimate.ok());
  EXPECT_NEAR((*estimate)[2], 400, 1e-6);
  EXPECT_NEAR((*estimate)[0], 0, 1e-6);
}

TEST(DebiasTest, PreservesTotalOnRandomInputs) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int buckets = 2 + static_cast<int>(rng() % 63);
    std::vector<int64_t> observed(static_cast<size_t>(buckets));
    int64_t n = 0;
    for (int64_t& c : observed) {
      c = static_cast<int64_t>(rng() % 1000);
      n += c;
    }
    if (n == 0) continue;
    const double eps = 0.05 + UniformUnit(rng) * 10;
    auto estimate = DebiasHistogram(observed, n, buckets, eps);
    ASSERT_TRUE(estimate.ok());
    const double total =
        std::accumulate(estimate->begin(), estimate->end(), 0.0);
    EXPECT_NEAR(total, static_cast<double>(n), 1e-6);
  }
}

TEST(DebiasTest, RejectsInconsistentCounts) {
  std::vector<int64_t> observed = {1, 2, 3};
  EXPECT_EQ(ErrorKind(DebiasHistogram(observed, 7, 3, 1.0).status()),
            "InvalidHistogram");
  EXPECT_EQ(ErrorKind(DebiasHistogram(observed, 6, 4, 1.0).status()),
            "InvalidHistogram");
  EXPECT_EQ(ErrorKind(DebiasHistogram(observed, 6, 3, 0.0).status()),
            "DegenerateBudget");
}

TEST(DebiasTest, UnbiasedOverSeededRuns) {
  const std::vector<int64_t> truth = {400, 250, 150, 100, 60, 40};
  const int buckets = static_cast<int>(truth.size());
  const int64_t n = std::accumulate(truth.begin(), truth.end(), int64_t{0});
  const double eps = 1.5;
  constexpr int kRuns = 500;
  std::vector<std::vector<double>> runs;
  Rng rng(314);
  for (int run = 0; run < kRuns; ++run) {
    std::vector<int64_t> observed(truth.size(), 0);
    for (int v = 0; v < buckets; ++v) {
      for (int64_t i = 0; i < truth[static_cast<size_t>(v)]; ++i) {
        ++observed[static_cast<size_t>(KrrPerturb(v, buckets, eps, rng))];
      }
    }
    runs.push_back(*DebiasHistogram(observed, n, buckets, eps));
  }
  for (size_t v = 0; v < truth.size(); ++v) {
    double mean = 0;
    for (const auto& r : runs) mean += r[v];
    mean /= kRuns;
    double var = 0;
    for (const auto& r : runs) var += (r[v] - mean) * (r[v] - mean);
    var /= kRuns - 1;
    const double se = std::sqrt(var / kRuns);
    EXPECT_NEAR(mean, static_cast<double>(truth[v]), 3 * se) << "bucket " << v;
  }
}

TEST(HeavyHittersTest, NearNoiselessCounting) {
  std::vector<PerturbedReport> reports;
  for (int b : {0, 0, 0, 1, 1, 2}) reports.push_back(BucketReport(b));
  auto result = HeavyHitters(reports, HitterQuery(4, 2, 50.0));
  ASSERT_TRUE(result.ok()) << result.status();
  ASSERT_EQ(result->per_cluster.size(), 1u);
  const ClusterTopK& top = result->per_cluster[0];
  EXPECT_FALSE(top.cluster.has_value());
  ASSERT_EQ(top.top.size(), 2u);
  EXPECT_EQ(top.top[0].bucket, 0);
  EXPECT_NEAR(top.top[0].estimate, 3, 1e-6);
  EXPECT_EQ(top.top[1].bucket, 1);
  EXPECT_NEAR(top.top[1].estimate, 2, 1e-6);
  EXPECT_EQ(result->n_reports, 6);
}

TEST(HeavyHittersTest, TiesBreakToLowerBucket) {
  std::vector<PerturbedReport> reports;
  for (int b : {3, 1, 3, 1}) reports.push_back(BucketReport(b));
  auto result = HeavyHitters(reports, HitterQuery(4, 3, 50.0));
  ASSERT_TRUE(result.ok());
  std::vector<int> order;
  for (const auto& e : result->per_cluster[0].top) order.push_back(e.bucket);
  EXPECT_THAT(order, ElementsAre(1, 3, 0));
}

TEST(HeavyHittersTest, ClustersAreIndependent) {
  Rng rng(8);
  std::vector<PerturbedReport> a, b;
  for (int i = 0; i < 300; ++i) {
    a.push_back(BucketReport(KrrPerturb(i % 3, 6, 2.0, rng), "A"));
    b.push_back(BucketReport(KrrPerturb(5 - i % 2, 6, 2.0, rng), "B"));
  }
  std::vector<PerturbedReport> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const FaQuery query = HitterQuery(6, 3, 2.0);
  auto joint = HeavyHitters(both, query);
  auto only_b = HeavyHitters(b, query);
  ASSERT_TRUE(joint.ok() && only_b.ok());
  ASSERT_EQ(joint->per_cluster.size(), 2u);
  EXPECT_EQ(joint->per_cluster[0].cluster, "A");
  const ClusterTopK& jb = joint->per_cluster[1];
  const ClusterTopK& ob = only_b->per_cluster[0];
  ASSERT_EQ(jb.top.size(), ob.top.size());
  for (size_t i = 0; i < jb.top.size(); ++i) {
    EXPECT_EQ(jb.top[i].bucket, ob.top[i].bucket);
    EXPECT_EQ(std::bit_cast<uint64_t>(jb.top[i].estimate),
              std::bit_cast<uint64_t>(ob.top[i].estimate));
  }
}

TEST(HeavyHittersTest, UnlabeledClusterSortsFirst) {
  std::vector<PerturbedReport> reports = {BucketReport(0, "z"),
                                          BucketReport(1),
                                          BucketReport(2, "a")};
  auto result = HeavyHitters(reports, HitterQuery(3, 1, 50.0));
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result->per_cluster.size(), 3u);
  EXPECT_FALSE(result->per_cluster[0].cluster.has_value());
  EXPECT_EQ(result->per_cluster[1].cluster, "a");
  EXPECT_EQ(result->per_cluster[2].cluster, "z");
}

TEST(HeavyHittersTest, LargeBudgetMatchesExactTopK) {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int buckets = 12;
    std::vector<int64_t> truth(buckets, 0);
    std::vector<PerturbedReport> reports;
    for (int i = 0; i < 2000; ++i) {
      // Skewed draw so that counts are mostly distinct.
      const int b = static_cast<int>(
          std::min<uint64_t>(UniformIndex(rng, 40) / 3, buckets - 1));
      ++truth[static_cast<size_t>(b)];
      reports.push_back(BucketReport(KrrPerturb(b, buckets, 60.0, rng)));
    }
    std::vector<int> oracle(buckets);
    std::iota(oracle.begin(), oracle.end(), 0);
    std::stable_sort(oracle.begin(), oracle.end(), [&](int x, int y) {
      return truth[static_cast<size_t>(x)] > truth[static_cast<size_t>(y)];
    });
    auto result = HeavyHitters(reports, HitterQuery(buckets, 4, 60.0));
    ASSERT_TRUE(result.ok());
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(result->per_cluster[0].top[static_cast<size_t>(i)].bucket,
                oracle[static_cast<size_t>(i)]);
    }
  }
}

TEST(HeavyHittersTest, RejectsBadInput) {
  const FaQuery query = HitterQuery(3, 1, 1.0);
  EXPECT_EQ(ErrorKind(HeavyHitters({}, query).status()), "NoReports");
  std::vector<PerturbedReport> wrong_id = {BucketReport(0, {}, "other")};
  EXPECT_EQ(ErrorKind(HeavyHitters(wrong_id, query).status()),
            "QueryMismatch");
  std::vector<PerturbedReport> out_of_range = {BucketReport(3)};
  EXPECT_EQ(ErrorKind(HeavyHitters(out_of_range, query).status()),
            "InvalidPayload");
  std::vector<PerturbedReport> real_payload = {{"q1", "p", 0.5, {}}};
  EXPECT_EQ(ErrorKind(HeavyHitters(real_payload, query).status()),
            "InvalidPayload");
}

TEST(DpMeanTest, VanishingNoise) {
  DpMeanQuery q{"steps", 0, 5000, 1e6};
  std::vector<double> values = {1000, 3000};
  Rng rng(1);
  EXPECT_NEAR(*DpMean(values, q, rng), 2000, 0.1);
}

TEST(DpMeanTest, ClippingFloor) {
  DpMeanQuery q{"steps", 0, 5000, 1e6};
  std::vector<double> values = {-10, -300, -1e9};
  Rng rng(1);
  EXPECT_NEAR(*DpMean(values, q, rng), 0, 0.1);
}

TEST(DpMeanTest, EmptyInput) {
  Rng rng(1);
  EXPECT_EQ(ErrorKind(DpMean({}, DpMeanQuery{}, rng).status()), "EmptyInput");
}

TEST(DpMeanTest, UnbiasedOverSeededRuns) {
  DpMeanQuery q{"steps", 0, 5000, 1.0};
  std::vector<double> values(10000, 2500);
  constexpr int kRuns = 1000;
  double sum = 0;
  for (int run = 0; run < kRuns; ++run) {
    Rng rng(MixSeed(77, static_cast<uint64_t>(run)));
    sum += *DpMean(values, q, rng);
  }
  // Laplace(b) has standard deviation b sqrt(2); b / n = 0.5.
  const double se = 0.5 * std::sqrt(2.0) / std::sqrt(double{kRuns});
  EXPECT_NEAR(sum / kRuns, 2500, 3 * se);
}

TEST(DpMeanTest, LaplaceScaleMatchesSensitivity) {
  Rng rng(3);
  constexpr int kDraws = 200000;
  double sum_abs = 0;
  for (int i = 0; i < kDraws; ++i) sum_abs += std::abs(SampleLaplace(2.0, rng));
  // E|X| = b for Laplace(0, b).
  EXPECT_NEAR(sum_abs / kDraws, 2.0, 0.02);
}

TEST(DpMeanTest, LocalContributionsAggregateToMean) {
  FaQuery query{"m", DpMeanQuery{"steps", 0, 10000, 1e7}};
  const auto& q = std::get<DpMeanQuery>(query.kind);
  Rng rng(4);
  std::vector<PerturbedReport> reports;
  for (double v : {2000.0, 4000.0, 12000.0}) {
    reports.push_back({"m", "p", LocalDpMeanContribution(v, q, rng), {}});
  }
  auto result = AggregateDpMean(reports, query);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_NEAR(result->estimate, (2000.0 + 4000 + 10000) / 3, 0.01);
  EXPECT_EQ(result->n_reports, 3);
  std::vector<PerturbedReport> bucket = {BucketReport(1, {}, "m")};
  EXPECT_EQ(ErrorKind(AggregateDpMean(bucket, query).status()),
            "InvalidPayload");
}

TEST(DeIdentifyTest, FreshPseudonymPerQuery) {
  RawRecord record{"student-17", {{"steps", 8123}}, "2027"};
  Rng rng(5);
  PerturbedReport a = DeIdentify(record, "q1", rng);
  PerturbedReport b = DeIdentify(record, "q2", rng);
  EXPECT_NE(a.pseudonym, b.pseudonym);
  EXPECT_EQ(a.pseudonym.size(), 32u);
  EXPECT_EQ(a.cluster, "2027");
  EXPECT_EQ(a.query_id, "q1");
  EXPECT_EQ(a.pseudonym.find("student"), std::string::npos);
}

TEST(DeIdentifyTest, NoCollisionsInAMillionTokens) {
  Rng rng(6);
  std::unordered_set<std::string> seen;
  seen.reserve(1000000);
  for (int i = 0; i < 1000000; ++i) {
    ASSERT_TRUE(seen.insert(NewPseudonym(rng)).second) << "collision at " << i;
  }
}

TEST(DeIdentifyTest, EntropySeededTokensDiffer) {
  EXPECT_NE(NewPseudonym(), NewPseudonym());
}

TEST(RecommendTest, Bands) {
  EXPECT_EQ(Band(5000, 8000), ActivityBand::kIncreaseActivity);
  EXPECT_EQ(Band(8000, 8000), ActivityBand::kOnTrack);
  EXPECT_EQ(Band(6400, 8000), ActivityBand::kOnTrack);
  EXPECT_EQ(Band(9601, 8000), ActivityBand::kMaintainHigh);
  EXPECT_EQ(Band(100, 0), ActivityBand::kOnTrack);
  EXPECT_EQ(BandName(ActivityBand::kMaintainHigh), "MaintainHigh");
}

TEST(RecommendTest, PairAndConfigurableThresholds) {
  Recommendation r = Recommend({8000, 2000}, {5000, 2600});
  EXPECT_EQ(r.steps, ActivityBand::kIncreaseActivity);
  EXPECT_EQ(r.calories, ActivityBand::kMaintainHigh);
  Recommendation loose = Recommend({8000, 2000}, {5000, 2600}, {0.5, 1.5});
  EXPECT_EQ(loose.steps, ActivityBand::kOnTrack);
  EXPECT_EQ(loose.calories, ActivityBand::kOnTrack);
}

TEST(RecommendTest, ScaleInvariant) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double cohort = 1 + UniformUnit(rng) * 10000;
    const double user = UniformUnit(rng) * 20000;
    // Powers of two keep the scaled comparison exact.
    const double scale = std::ldexp(1.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(Band(user, cohort), Band(user * scale, cohort * scale));
  }
}

TEST(FaQueryTest, JsonRoundTrip) {
  FaQuery hh = HitterQuery(5, 2, 3.5, "steps-hh");
  auto back = QueryFromJson(QueryToJson(hh));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, hh);
  FaQuery mean{"cal", DpMeanQuery{"calories", 0, 4000, 0.5}};
  auto back_mean = QueryFromJson(QueryToJson(mean));
  ASSERT_TRUE(back_mean.ok());
  EXPECT_EQ(*back_mean, mean);
}

TEST(FaQueryTest, RejectsInvalidQueries) {
  FaQuery too_many = HitterQuery(3, 4, 1.0);
  EXPECT_EQ(ErrorKind(ValidateQuery(too_many)), "InvalidQuery");
  FaQuery bad_eps = HitterQuery(3, 1, 0.0);
  EXPECT_EQ(ErrorKind(ValidateQuery(bad_eps)), "InvalidQuery");
  FaQuery one_bucket{"q", HeavyHittersQuery{Edges({0, 1}), 1, 1.0}};
  EXPECT_EQ(ErrorKind(ValidateQuery(one_bucket)), "InvalidQuery");
  FaQuery unsorted{"q", HeavyHittersQuery{Edges({0, 2, 1}), 1, 1.0}};
  EXPECT_EQ(ErrorKind(ValidateQuery(unsorted)), "InvalidQuery");
  FaQuery inverted{"q", DpMeanQuery{"steps", 5, 5, 1.0}};
  EXPECT_EQ(ErrorKind(ValidateQuery(inverted)), "InvalidQuery");
  auto unknown = QueryFromJson(nlohmann::json::parse(
      R"({"query_id":"q","kind":"median","attribute":"steps"})"));
  EXPECT_EQ(ErrorKind(unknown.status()), "InvalidQuery");
}

TEST(FaQueryTest, ResultJsonShape) {
  HeavyHitterResult result{"q", {{std::nullopt, 4, {{2, 3.5}}},
                                 {"b", 2, {{0, 2.0}}}},
                           6};
  nlohmann::json doc = FaResultToJson(result);
  EXPECT_EQ(doc["kind"], "heavy_hitters");
  EXPECT_TRUE(doc["per_cluster"][0]["cluster"].is_null());
  EXPECT_EQ(doc["per_cluster"][1]["cluster"], "b");
  EXPECT_EQ(doc["per_cluster"][0]["top"][0]["bucket"], 2);
  EXPECT_EQ(doc["n_reports"], 6);
  nlohmann::json mean = FaResultToJson(DpMeanResult{"m", 12.5, 3});
  EXPECT_EQ(mean["kind"], "dp_mean");
  EXPECT_EQ(mean["estimate"], 12.5);
}

}  // namespace
}  // namespace campusfl
