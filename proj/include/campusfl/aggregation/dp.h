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

#ifndef CAMPUSFL_AGGREGATION_DP_H_
#define CAMPUSFL_AGGREGATION_DP_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/base/random.h"
#include "nlohmann/json.hpp"

namespace campusfl {

// Client-side differential privacy for model updates.
struct DpConfig {
  bool enabled = false;
  double clip_norm = 1.0;
  double epsilon = 1.0;
  double delta = 1e-5;
  // Replaces the calibrated noise scale when set (0 disables noise).
  std::optional<double> sigma_override;

  friend bool operator==(const DpConfig&, const DpConfig&) = default;
};

// {enabled, clip_norm, epsilon, delta, sigma_override: number | null}
nlohmann::json DpConfigToJson(const DpConfig& dp);
absl::StatusOr<DpConfig> DpConfigFromJson(const nlohmann::json& doc);

// Checks the budget of an enabled config. Errors: InvalidBudget.
absl::Status ValidateDpConfig(const DpConfig& dp);

// Scales `delta` onto the L2 ball of radius `clip_norm`; vectors already
// inside are returned unchanged.
std::vector<double> ClipL2(std::span<const double> delta, double clip_norm);

// sigma_override if set, else C * sqrt(2 ln(1.25 / delta)) / epsilon.
// Errors: InvalidBudget.
absl::StatusOr<double> GaussianSigma(const DpConfig& dp);

// base + ClipL2(trained - base, C) + N(0, sigma^2) per coordinate, or
// `trained` untouched when DP is disabled. When no clipping occurs the sum is
// formed as trained + noise, which is the same quantity without the
// cancellation error of (trained - base) + base.
// Errors: LengthMismatch, InvalidBudget.
absl::StatusOr<std::vector<double>> PrivatizeUpdate(
    std::span<const double> base_params, std::span<const double> trained_params,
    const DpConfig& dp, Rng& rng);

}  // namespace campusfl

#endif  // CAMPUSFL_AGGREGATION_DP_H_
