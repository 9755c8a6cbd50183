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

#include "campusfl/analytics/recommend.h"

namespace campusfl {

std::string_view BandName(ActivityBand band) {
  switch (band) {
    case ActivityBand::kIncreaseActivity:
      return "IncreaseActivity";
    case ActivityBand::kOnTrack:
      return "OnTrack";
    case ActivityBand::kMaintainHigh:
      return "MaintainHigh";
  }
  return "OnTrack";
}

ActivityBand Band(double user, double cohort_mean,
                  const RecommendThresholds& thresholds) {
  if (!(cohort_mean > 0)) return ActivityBand::kOnTrack;
  if (user < thresholds.low * cohort_mean) return ActivityBand::kIncreaseActivity;
  if (user > thresholds.high * cohort_mean) return ActivityBand::kMaintainHigh;
  return ActivityBand::kOnTrack;
}

Recommendation Recommend(const CohortStats& cohort, const UserStats& user,
                         const RecommendThresholds& thresholds) {
  return {Band(user.steps, cohort.mean_steps, thresholds),
          Band(user.calories, cohort.mean_calories, thresholds)};
}

}  // namespace campusfl
