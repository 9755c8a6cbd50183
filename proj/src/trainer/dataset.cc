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

#include "campusfl/trainer/dataset.h"

#include <cassert>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {

Matrix::Matrix(size_t rows, size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  assert(data_.size() == rows_ * cols_);
}

void Matrix::AppendRow(std::span<const double> row) {
  if (rows_ == 0 && cols_ == 0) cols_ = row.size();
  assert(row.size() == cols_);
  data_.insert(data_.end(), row.begin(), row.end());
  ++rows_;
}

void Dataset::Append(const Dataset& other) {
  for (size_t r = 0; r < other.size(); ++r) {
    features.AppendRow(other.features.Row(r));
  }
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  kind = other.kind;
}

absl::Status ValidateDataset(const Dataset& data, size_t n_features,
                             TaskKind kind, size_t n_classes) {
  auto mismatch = [](const std::string& detail) {
    return MakeError(absl::StatusCode::kInvalidArgument, "DimensionMismatch",
                     detail);
  };
  if (data.size() == 0) return mismatch("dataset is empty");
  if (data.features.cols() != n_features) {
    return mismatch(absl::StrCat("dataset has ", data.features.cols(),
                                 " features, model expects ", n_features));
  }
  if (data.labels.size() != data.size()) {
    return mismatch(absl::StrCat(data.labels.size(), " labels for ",
                                 data.size(), " rows"));
  }
  if (data.kind != kind) return mismatch("dataset task kind differs from model");
  if (kind == TaskKind::kClassification) {
    for (double label : data.labels) {
      if (label < 0 || label >= static_cast<double>(n_classes) ||
          label != std::floor(label)) {
        return mismatch(absl::StrCat("class label ", label, " outside [0, ",
                                     n_classes, ")"));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace campusfl
