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

#include "campusfl/analytics/deidentify.h"

#include <cstdio>
#include <random>

namespace campusfl {

std::string NewPseudonym(Rng& rng) {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return std::string(buf, 32);
}

std::string NewPseudonym() {
  std::random_device device;
  Rng rng((static_cast<uint64_t>(device()) << 32) ^ device());
  return NewPseudonym(rng);
}

PerturbedReport DeIdentify(const RawRecord& record, const std::string& query_id,
                           Rng& rng) {
  PerturbedReport report;
  report.query_id = query_id;
  report.pseudonym = NewPseudonym(rng);
  report.cluster = record.cluster;
  return report;
}

}  // namespace campusfl
