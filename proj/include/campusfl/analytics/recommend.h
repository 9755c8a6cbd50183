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

#ifndef CAMPUSFL_ANALYTICS_RECOMMEND_H_
#define CAMPUSFL_ANALYTICS_RECOMMEND_H_

#include <string_view>

namespace campusfl {

enum class ActivityBand { kIncreaseActivity, kOnTrack, kMaintainHigh };

std::string_view BandName(ActivityBand band);

struct CohortStats {
  double mean_steps = 0;
  double mean_calories = 0;
};

struct UserStats {
  double steps = 0;
  double calories = 0;
};

struct RecommendThresholds {
  double low = 0.8;
  double high = 1.2;
};

struct Recommendation {
  ActivityBand steps;
  ActivityBand calories;
};

// Below low x cohort mean -> IncreaseActivity, above high x mean ->
// MaintainHigh, otherwise OnTrack. A non-positive cohort mean collapses the
// bands and yields OnTrack.
ActivityBand Band(double user, double cohort_mean,
                  const RecommendThresholds& thresholds = {});

Recommendation Recommend(const CohortStats& cohort, const UserStats& user,
                         const RecommendThresholds& thresholds = {});

}  // namespace campusfl

#endif  // CAMPUSFL_ANALYTICS_RECOMMEND_H_
