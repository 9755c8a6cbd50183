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

#ifndef CAMPUSFL_BASE_RANDOM_H_
#define CAMPUSFL_BASE_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace campusfl {

// All randomness is injected; nothing reads ambient entropy except the
// production pseudonym path when no generator is supplied.
using Rng = std::mt19937_64;

// Stable (cross-run, cross-platform) 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view data);

// SplitMix64 finalizer applied to a combination of two seeds. Used to derive
// independent child streams (per device, per round, per query).
uint64_t MixSeed(uint64_t a, uint64_t b);

inline uint64_t MixSeed(uint64_t a, std::string_view label) {
  return MixSeed(a, Fnv1a64(label));
}

// Uniform integer in [0, n) by rejection, independent of the standard
// library's distribution implementation.
uint64_t UniformIndex(Rng& rng, uint64_t n);

// Uniform real in [0, 1) with 53 random bits.
double UniformUnit(Rng& rng);

}  // namespace campusfl

#endif  // CAMPUSFL_BASE_RANDOM_H_
