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

#ifndef CAMPUSFL_ANALYTICS_DEIDENTIFY_H_
#define CAMPUSFL_ANALYTICS_DEIDENTIFY_H_

#include <map>
#include <optional>
#include <string>

#include "campusfl/analytics/fa_query.h"
#include "campusfl/base/random.h"

namespace campusfl {

// On-device record before anything is reported.
struct RawRecord {
  std::string client_id;
  std::map<std::string, double> attributes;
  std::optional<std::string> cluster;
};

// 128 random bits as 32 lowercase hex characters.
std::string NewPseudonym(Rng& rng);
// Same, seeded from the OS entropy source.
std::string NewPseudonym();

// Drops the stable identity and stamps a fresh pseudonym for this query. The
// payload is left for the caller to fill with a perturbed value.
PerturbedReport DeIdentify(const RawRecord& record, const std::string& query_id,
                           Rng& rng);

}  // namespace campusfl

#endif  // CAMPUSFL_ANALYTICS_DEIDENTIFY_H_
