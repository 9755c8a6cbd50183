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

#include "campusfl/aggregation/dp.h"

#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

using nlohmann::json;

absl::Status InvalidBudget(const std::string& detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidBudget", detail);
}

double L2Norm(std::span<const double> v) {
  double sum = 0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

json DpConfigToJson(const DpConfig& dp) {
  return json{{"enabled", dp.enabled},
              {"clip_norm", dp.clip_norm},
              {"epsilon", dp.epsilon},
              {"delta", dp.delta},
              {"sigma_override", dp.sigma_override.has_value()
                                     ? json(*dp.sigma_override)
                                     : json(nullptr)}};
}

absl::StatusOr<DpConfig> DpConfigFromJson(const json& doc) {
  if (!doc.is_object()) return InvalidBudget("dp must be an object");
  DpConfig dp;
  for (const auto& [key, value] : doc.items()) {
    if (key == "enabled") {
      if (!value.is_boolean()) return InvalidBudget("enabled must be a bool");
      dp.enabled = value.get<bool>();
    } else if (key == "clip_norm" || key == "epsilon" || key == "delta") {
      if (!value.is_number()) return InvalidBudget(key + " must be a number");
      (key == "clip_norm" ? dp.clip_norm
       : key == "epsilon" ? dp.epsilon
                          : dp.delta) = value.get<double>();
    } else if (key == "sigma_override") {
      if (value.is_null()) {
        dp.sigma_override.reset();
      } else if (value.is_number()) {
        dp.sigma_override = value.get<double>();
      } else {
        return InvalidBudget("sigma_override must be a number or null");
      }
    } else {
      return InvalidBudget(absl::StrCat("unknown field '", key, "'"));
    }
  }
  CAMPUSFL_RETURN_IF_ERROR(ValidateDpConfig(dp));
  return dp;
}

absl::Status ValidateDpConfig(const DpConfig& dp) {
  if (!dp.enabled) return absl::OkStatus();
  if (!(dp.clip_norm > 0)) return InvalidBudget("clip_norm must be positive");
  if (dp.sigma_override.has_value()) {
    if (!(*dp.sigma_override >= 0) || !std::isfinite(*dp.sigma_override)) {
      return InvalidBudget("sigma_override must be finite and non-negative");
    }
    return absl::OkStatus();
  }
  if (!(dp.epsilon > 0)) return InvalidBudget("epsilon must be positive");
  if (!(dp.delta > 0 && dp.delta < 1)) {
    return InvalidBudget("delta must lie in (0, 1)");
  }
  return absl::OkStatus();
}

std::vector<double> ClipL2(std::span<const double> delta, double clip_norm) {
  std::vector<double> out(delta.begin(), delta.end());
  const double norm = L2Norm(delta);
  if (norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (double& v : out) v *= scale;
  }
  return out;
}

absl::StatusOr<double> GaussianSigma(const DpConfig& dp) {
  if (dp.sigma_override.has_value()) {
    if (!(*dp.sigma_override >= 0)) {
      return InvalidBudget("sigma_override must be non-negative");
    }
    return *dp.sigma_override;
  }
  if (!(dp.epsilon > 0)) return InvalidBudget("epsilon must be positive");
  if (!(dp.delta > 0 && dp.delta < 1)) {
    return InvalidBudget("delta must lie in (0, 1)");
  }
  return dp.clip_norm * std::sqrt(2.0 * std::log(1.25 / dp.delta)) /
         dp.epsilon;
}

absl::StatusOr<std::vector<double>> PrivatizeUpdate(
    std::span<const double> base_params, std::span<const double> trained_params,
    const DpConfig& dp, Rng& rng) {
  if (base_params.size() != trained_params.size()) {
    return MakeError(absl::StatusCode::kInvalidArgument, "LengthMismatch",
                     absl::StrCat("base has ", base_params.size(),
                                  " params, trained has ",
                                  trained_params.size()));
  }
  if (!dp.enabled) {
    return std::vector<double>(trained_params.begin(), trained_params.end());
  }
  CAMPUSFL_RETURN_IF_ERROR(ValidateDpConfig(dp));
  CAMPUSFL_ASSIGN_OR_RETURN(const double sigma, GaussianSigma(dp));

  const size_t n = base_params.size();
  std::vector<double> delta(n);
  for (size_t i = 0; i < n; ++i) delta[i] = trained_params[i] - base_params[i];
  const bool clipped = L2Norm(delta) > dp.clip_norm;

  std::vector<double> out(n);
  if (clipped) {
    delta = ClipL2(delta, dp.clip_norm);
    for (size_t i = 0; i < n; ++i) out[i] = base_params[i] + delta[i];
  } else {
    out.assign(trained_params.begin(), trained_params.end());
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  for (size_t i = 0; i < n; ++i) {
    const double draw = noise(rng);
    if (sigma > 0) out[i] += sigma * draw;
  }
  return out;
}

}  // namespace campusfl
