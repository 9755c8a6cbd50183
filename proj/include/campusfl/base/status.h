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

#ifndef CAMPUSFL_BASE_STATUS_H_
#define CAMPUSFL_BASE_STATUS_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace campusfl {

// Every error produced by this project carries a short machine-readable kind
// ("MissingLayer", "Truncated", ...) as a status payload. The message is
// "<kind>: <detail>".
absl::Status MakeError(absl::StatusCode code, std::string_view kind,
                       std::string_view detail);

// Returns the kind attached by MakeError, or an empty string.
std::string ErrorKind(const absl::Status& status);

namespace internal {
inline const absl::Status& AsStatus(const absl::Status& s) { return s; }
template <typename T>
const absl::Status& AsStatus(const absl::StatusOr<T>& s) {
  return s.status();
}
}  // namespace internal

}  // namespace campusfl

#define CAMPUSFL_STATUS_CONCAT_INNER_(a, b) a##b
#define CAMPUSFL_STATUS_CONCAT_(a, b) CAMPUSFL_STATUS_CONCAT_INNER_(a, b)

#define CAMPUSFL_RETURN_IF_ERROR(expr)                              \
  do {                                                              \
    const absl::Status _campusfl_status =                           \
        ::campusfl::internal::AsStatus(expr);                       \
    if (!_campusfl_status.ok()) return _campusfl_status;            \
  } while (false)

#define CAMPUSFL_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                    \
  if (!tmp.ok()) return tmp.status();                   \
  lhs = std::move(tmp).value()

#define CAMPUSFL_ASSIGN_OR_RETURN(lhs, expr) \
  CAMPUSFL_ASSIGN_OR_RETURN_IMPL_(           \
      CAMPUSFL_STATUS_CONCAT_(_campusfl_statusor_, __LINE__), lhs, expr)

#endif  // CAMPUSFL_BASE_STATUS_H_
