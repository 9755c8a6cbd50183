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

#ifndef CAMPUSFL_CLI_CLI_H_
#define CAMPUSFL_CLI_CLI_H_

#include <ostream>

namespace campusfl {

// Entry point of the campusfl tool:
//
//   server  --config PATH
//   fleet   --n N --server HOST[:PORT] --seed S
//   demo    --task {sleep|activity|recommend|hitters} --clients N
//           --rounds R --seed S
//   inspect --data-dir PATH
//
// Returns 0 on success, 1 when the run fails, 2 on bad flags (usage goes to
// `err`).
int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace campusfl

#endif  // CAMPUSFL_CLI_CLI_H_
