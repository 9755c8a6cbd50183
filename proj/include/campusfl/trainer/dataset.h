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

#ifndef CAMPUSFL_TRAINER_DATASET_H_
#define CAMPUSFL_TRAINER_DATASET_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/status.h"

namespace campusfl {

// Dense row-major matrix of reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(size_t rows, size_t cols, std::vector<double> data);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> Row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> Row(size_t r) { return {data_.data() + r * cols_, cols_}; }

  void AppendRow(std::span<const double> row);

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

enum class TaskKind { kRegression, kClassification };

// Labels are reals for regression and class indices (stored as integral
// doubles) for classification.
struct Dataset {
  Matrix features;
  std::vector<double> labels;
  TaskKind kind = TaskKind::kRegression;

  size_t size() const { return features.rows(); }

  // Appends every row of `other`; kinds and widths must agree.
  void Append(const Dataset& other);
};

// Checks the dataset against a model with `n_features` inputs; `n_classes` is
// ignored for regression. Errors carry kind "DimensionMismatch".
absl::Status ValidateDataset(const Dataset& data, size_t n_features,
                             TaskKind kind, size_t n_classes);

}  // namespace campusfl

#endif  // CAMPUSFL_TRAINER_DATASET_H_
