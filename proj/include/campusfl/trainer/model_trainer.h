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

#ifndef CAMPUSFL_TRAINER_MODEL_TRAINER_H_
#define CAMPUSFL_TRAINER_MODEL_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "campusfl/model/canonical_model.h"
#include "campusfl/trainer/dataset.h"
#include "nlohmann/json.hpp"

namespace campusfl {

struct Hyperparams {
  double learning_rate = 0.1;
  int epochs = 1;
  // nullopt trains on the full dataset per step.
  std::optional<int> batch_size;
  uint64_t seed = 0;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// {learning_rate, epochs, batch_size: int | "full", seed}
nlohmann::json HyperparamsToJson(const Hyperparams& hp);
absl::StatusOr<Hyperparams> HyperparamsFromJson(const nlohmann::json& doc);
absl::Status ValidateHyperparams(const Hyperparams& hp);

struct TrainReport {
  std::vector<double> params;
  int64_t num_examples = 0;
  double initial_loss = 0;
  double final_loss = 0;
};

struct Evaluation {
  double loss = 0;
  // MSE for regression, accuracy in [0, 1] for classification.
  double metric = 0;
};

// Uniform training surface over the supported architectures: get/set the flat
// parameter vector, fit, evaluate, predict.
//
// Layer layout the ModelSpec must follow:
//   Linear: w[in] or w[in, out], b[out]
//   Mlp:    w1[in, hidden], b1[hidden], w2[hidden, out], b2[out] (ReLU)
// An output width of 1 trains with mean squared error; a width >= 2 trains a
// softmax classifier with cross-entropy.
//
// A trainer is single-owner; distinct trainers are independent.
class ModelTrainer {
 public:
  // Linear models start at zero; Mlp parameters are uniform in (-0.1, 0.1)
  // drawn from `init_seed`. Errors: ArchitectureMismatch.
  static absl::StatusOr<ModelTrainer> Create(const ModelSpec& spec,
                                             uint64_t init_seed);

  const ModelSpec& spec() const { return spec_; }
  TaskKind task_kind() const;
  size_t input_width() const { return layers_.front().in; }
  size_t output_width() const { return layers_.back().out; }

  std::vector<double> GetParameters() const { return params_; }
  absl::Status SetParameters(std::span<const double> params);

  // Mini-batch gradient descent. On error the parameters are left untouched.
  // Errors: DimensionMismatch, InvalidHyperparams, NonFiniteLoss.
  absl::StatusOr<TrainReport> Fit(const Dataset& data, const Hyperparams& hp);

  absl::StatusOr<Evaluation> Evaluate(const Dataset& data) const;

  // Regression: rows x 1 predictions. Classification: rows x classes
  // probabilities.
  absl::StatusOr<Matrix> Predict(const Matrix& features) const;

  // Mean loss of `params` over `data`; fills `gradient` when non-null.
  absl::StatusOr<double> LossAndGradient(const Dataset& data,
                                         std::span<const double> params,
                                         std::vector<double>* gradient) const;

 private:
  struct Dense {
    size_t weight_offset;
    size_t bias_offset;
    size_t in;
    size_t out;
    bool relu;
  };

  ModelTrainer(ModelSpec spec, std::vector<Dense> layers,
               std::vector<double> params)
      : spec_(std::move(spec)),
        layers_(std::move(layers)),
        params_(std::move(params)) {}

  absl::Status CheckData(const Dataset& data) const;

  // Forward pass for one example; `activations[k]` is the input of layer k and
  // the final entry holds the raw outputs.
  void Forward(std::span<const double> params, std::span<const double> x,
               std::vector<std::vector<double>>& activations) const;

  // Loss of the rows `indices` (all rows when empty) and optional gradient.
  double BatchLoss(const Dataset& data, std::span<const size_t> indices,
                   std::span<const double> params,
                   std::vector<double>* gradient) const;

  ModelSpec spec_;
  std::vector<Dense> layers_;
  std::vector<double> params_;
};

}  // namespace campusfl

#endif  // CAMPUSFL_TRAINER_MODEL_TRAINER_H_
