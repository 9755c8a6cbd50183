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

#include "campusfl/trainer/model_trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "campusfl/base/random.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

using nlohmann::json;

absl::Status ArchMismatch(const std::string& detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "ArchitectureMismatch",
                   detail);
}

absl::Status NonFinite(const std::string& detail) {
  return MakeError(absl::StatusCode::kOutOfRange, "NonFiniteLoss", detail);
}

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

// In-place softmax; returns log-sum-exp of the input logits.
double Softmax(std::vector<double>& logits) {
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (double& v : logits) {
    v = std::exp(v - max);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return max + std::log(sum);
}

}  // namespace

json HyperparamsToJson(const Hyperparams& hp) {
  json doc{{"learning_rate", hp.learning_rate},
           {"epochs", hp.epochs},
           {"seed", hp.seed}};
  if (hp.batch_size.has_value()) {
    doc["batch_size"] = *hp.batch_size;
  } else {
    doc["batch_size"] = "full";
  }
  return doc;
}

absl::StatusOr<Hyperparams> HyperparamsFromJson(const json& doc) {
  auto bad = [](const std::string& detail) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidHyperparams",
                     detail);
  };
  if (!doc.is_object()) return bad("hyperparams must be an object");
  Hyperparams hp;
  for (const auto& [key, value] : doc.items()) {
    if (key == "learning_rate") {
      if (!value.is_number()) return bad("learning_rate must be a number");
      hp.learning_rate = value.get<double>();
    } else if (key == "epochs") {
      if (!value.is_number_integer()) return bad("epochs must be an integer");
      hp.epochs = value.get<int>();
    } else if (key == "batch_size") {
      if (value.is_string() && value.get<std::string>() == "full") {
        hp.batch_size.reset();
      } else if (value.is_number_integer()) {
        hp.batch_size = value.get<int>();
      } else {
        return bad("batch_size must be an integer or \"full\"");
      }
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) {
        return bad("seed must be an integer");
      }
      hp.seed = value.get<uint64_t>();
    } else {
      return bad(absl::StrCat("unknown field '", key, "'"));
    }
  }
  CAMPUSFL_RETURN_IF_ERROR(ValidateHyperparams(hp));
  return hp;
}

absl::Status ValidateHyperparams(const Hyperparams& hp) {
  auto bad = [](const std::string& detail) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidHyperparams",
                     detail);
  };
  if (!(hp.learning_rate > 0) || !std::isfinite(hp.learning_rate)) {
    return bad("learning_rate must be positive");
  }
  if (hp.epochs < 1) return bad("epochs must be >= 1");
  if (hp.batch_size.has_value() && *hp.batch_size < 1) {
    return bad("batch_size must be >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<ModelTrainer> ModelTrainer::Create(const ModelSpec& spec,
                                                  uint64_t init_seed) {
  auto shape_of = [&spec](size_t i) -> const std::vector<int64_t>& {
    return spec.layers[i].shape;
  };
  auto expect_names = [&spec](std::initializer_list<const char*> names)
      -> absl::Status {
    if (spec.layers.size() != names.size()) {
      return ArchMismatch(absl::StrCat("expected ", names.size(),
                                       " layers, got ", spec.layers.size()));
    }
    size_t i = 0;
    for (const char* name : names) {
      if (spec.layers[i].name != name) {
        return ArchMismatch(absl::StrCat("layer ", i, " is '",
                                         spec.layers[i].name, "', expected '",
                                         name, "'"));
      }
      ++i;
    }
    return absl::OkStatus();
  };

  std::vector<Dense> layers;
  std::vector<double> params(spec.ParameterCount(), 0.0);
  if (spec.arch.kind == Architecture::Kind::kLinear) {
    CAMPUSFL_RETURN_IF_ERROR(expect_names({"w", "b"}));
    const auto& w = shape_of(0);
    const auto& b = shape_of(1);
    size_t in = 0, out = 0;
    if (w.size() == 1 && b == std::vector<int64_t>{1}) {
      in = static_cast<size_t>(w[0]);
      out = 1;
    } else if (w.size() == 2 && b.size() == 1 && b[0] == w[1]) {
      in = static_cast<size_t>(w[0]);
      out = static_cast<size_t>(w[1]);
    } else {
      return ArchMismatch("linear layers must be w[in] + b[1] or w[in,out] + b[out]");
    }
    layers.push_back({spec.layers[0].offset, spec.layers[1].offset, in, out,
                      /*relu=*/false});
  } else {
    CAMPUSFL_RETURN_IF_ERROR(expect_names({"w1", "b1", "w2", "b2"}));
    const int64_t h = spec.arch.hidden;
    const auto& w1 = shape_of(0);
    const auto& b1 = shape_of(1);
    const auto& w2 = shape_of(2);
    const auto& b2 = shape_of(3);
    if (w1.size() != 2 || w1[1] != h || b1 != std::vector<int64_t>{h} ||
        w2.size() != 2 || w2[0] != h || b2 != std::vector<int64_t>{w2[1]}) {
      return ArchMismatch(absl::StrCat(
          "mlp layers must be w1[in,", h, "], b1[", h, "], w2[", h,
          ",out], b2[out]"));
    }
    layers.push_back({spec.layers[0].offset, spec.layers[1].offset,
                      static_cast<size_t>(w1[0]), static_cast<size_t>(h),
                      /*relu=*/true});
    layers.push_back({spec.layers[2].offset, spec.layers[3].offset,
                      static_cast<size_t>(h), static_cast<size_t>(w2[1]),
                      /*relu=*/false});
    Rng rng(init_seed);
    for (double& p : params) p = -0.1 + 0.2 * UniformUnit(rng);
  }
  if (layers.front().in < 1 || layers.back().out < 1) {
    return ArchMismatch("layer widths must be positive");
  }
  return ModelTrainer(spec, std::move(layers), std::move(params));
}

TaskKind ModelTrainer::task_kind() const {
  return output_width() == 1 ? TaskKind::kRegression
                             : TaskKind::kClassification;
}

absl::Status ModelTrainer::SetParameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    return MakeError(absl::StatusCode::kInvalidArgument, "LengthMismatch",
                     absl::StrCat("got ", params.size(), " parameters, model has ",
                                  params_.size()));
  }
  params_.assign(params.begin(), params.end());
  return absl::OkStatus();
}

absl::Status ModelTrainer::CheckData(const Dataset& data) const {
  return ValidateDataset(data, input_width(), task_kind(), output_width());
}

void ModelTrainer::Forward(std::span<const double> params,
                           std::span<const double> x,
                           std::vector<std::vector<double>>& activations) const {
  activations.resize(layers_.size() + 1);
  activations[0].assign(x.begin(), x.end());
  for (size_t k = 0; k < layers_.size(); ++k) {
    const Dense& layer = layers_[k];
    const std::vector<double>& input = activations[k];
    std::vector<double>& output = activations[k + 1];
    output.assign(params.begin() + layer.bias_offset,
                  params.begin() + layer.bias_offset + layer.out);
    for (size_t i = 0; i < layer.in; ++i) {
      const double xi = input[i];
      const double* row = params.data() + layer.weight_offset + i * layer.out;
      for (size_t j = 0; j < layer.out; ++j) output[j] += xi * row[j];
    }
    if (layer.relu) {
      for (double& v : output) v = v > 0 ? v : 0;
    }
  }
}

double ModelTrainer::BatchLoss(const Dataset& data,
                               std::span<const size_t> indices,
                               std::span<const double> params,
                               std::vector<double>* gradient) const {
  const size_t n = indices.empty() ? data.size() : indices.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (gradient != nullptr) gradient->assign(params.size(), 0.0);
  const bool regression = task_kind() == TaskKind::kRegression;

  std::vector<std::vector<double>> acts;
  std::vector<double> delta, prev_delta;
  double total = 0;
  for (size_t e = 0; e < n; ++e) {
    const size_t row = indices.empty() ? e : indices[e];
    Forward(params, data.features.Row(row), acts);
    std::vector<double>& out = acts.back();
    const double y = data.labels[row];
    if (regression) {
      const double diff = out[0] - y;
      total += diff * diff;
      delta.assign(1, 2.0 * diff * inv_n);
    } else {
      std::vector<double> probs = out;
      const double lse = Softmax(probs);
      const size_t label = static_cast<size_t>(y);
      total += lse - out[label];
      delta = std::move(probs);
      delta[label] -= 1.0;
      for (double& d : delta) d *= inv_n;
    }
    if (gradient == nullptr) continue;

    // Backpropagate; `delta` is dLoss/d(pre-activation output) of layer k.
    for (size_t k = layers_.size(); k-- > 0;) {
      const Dense& layer = layers_[k];
      const std::vector<double>& input = acts[k];
      double* g = gradient->data();
      for (size_t j = 0; j < layer.out; ++j) g[layer.bias_offset + j] += delta[j];
      for (size_t i = 0; i < layer.in; ++i) {
        double* grow = g + layer.weight_offset + i * layer.out;
        for (size_t j = 0; j < layer.out; ++j) grow[j] += input[i] * delta[j];
      }
      if (k == 0) break;
      prev_delta.assign(layer.in, 0.0);
      for (size_t i = 0; i < layer.in; ++i) {
        const double* row = params.data() + layer.weight_offset + i * layer.out;
        double acc = 0;
        for (size_t j = 0; j < layer.out; ++j) acc += row[j] * delta[j];
        // input[i] is the ReLU output of the previous layer.
        prev_delta[i] = layers_[k - 1].relu && input[i] <= 0 ? 0.0 : acc;
      }
      delta.swap(prev_delta);
    }
  }
  return total * inv_n;
}

absl::StatusOr<double> ModelTrainer::LossAndGradient(
    const Dataset& data, std::span<const double> params,
    std::vector<double>* gradient) const {
  CAMPUSFL_RETURN_IF_ERROR(CheckData(data));
  if (params.size() != params_.size()) {
    return MakeError(absl::StatusCode::kInvalidArgument, "LengthMismatch",
                     absl::StrCat("got ", params.size(), " parameters"));
  }
  return BatchLoss(data, {}, params, gradient);
}

absl::StatusOr<TrainReport> ModelTrainer::Fit(const Dataset& data,
                                              const Hyperparams& hp) {
  CAMPUSFL_RETURN_IF_ERROR(CheckData(data));
  CAMPUSFL_RETURN_IF_ERROR(ValidateHyperparams(hp));

  std::vector<double> params = params_;
  TrainReport report;
  report.num_examples = static_cast<int64_t>(data.size());
  report.initial_loss = BatchLoss(data, {}, params, nullptr);
  if (!std::isfinite(report.initial_loss)) {
    return NonFinite("initial loss is not finite");
  }

  const size_t n = data.size();
  const size_t batch =
      hp.batch_size.has_value()
          ? std::min(n, static_cast<size_t>(*hp.batch_size))
          : n;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hp.seed);
  std::vector<double> gradient;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    if (batch < n) {
      for (size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[UniformIndex(rng, i + 1)]);
      }
    }
    for (size_t start = 0; start < n; start += batch) {
      const size_t end = std::min(n, start + batch);
      const double loss = BatchLoss(
          data, std::span<const size_t>(order).subspan(start, end - start),
          params, &gradient);
      if (!std::isfinite(loss) || !AllFinite(gradient)) {
        return NonFinite(absl::StrCat("diverged in epoch ", epoch + 1));
      }
      for (size_t i = 0; i < params.size(); ++i) {
        params[i] -= hp.learning_rate * gradient[i];
      }
    }
  }
  report.final_loss = BatchLoss(data, {}, params, nullptr);
  if (!std::isfinite(report.final_loss) || !AllFinite(params)) {
    return NonFinite("final loss is not finite");
  }
  params_ = params;
  report.params = std::move(params);
  return report;
}

absl::StatusOr<Evaluation> ModelTrainer::Evaluate(const Dataset& data) const {
  CAMPUSFL_RETURN_IF_ERROR(CheckData(data));
  Evaluation eval;
  eval.loss = BatchLoss(data, {}, params_, nullptr);
  if (task_kind() == TaskKind::kRegression) {
    eval.metric = eval.loss;
    return eval;
  }
  CAMPUSFL_ASSIGN_OR_RETURN(Matrix probs, Predict(data.features));
  size_t correct = 0;
  for (size_t r = 0; r < probs.rows(); ++r) {
    std::span<const double> row = probs.Row(r);
    const size_t argmax = static_cast<size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
    if (argmax == static_cast<size_t>(data.labels[r])) ++correct;
  }
  eval.metric = static_cast<double>(correct) / static_cast<double>(data.size());
  return eval;
}

absl::StatusOr<Matrix> ModelTrainer::Predict(const Matrix& features) const {
  if (features.cols() != input_width()) {
    return MakeError(absl::StatusCode::kInvalidArgument, "DimensionMismatch",
                     absl::StrCat("features have ", features.cols(),
                                  " columns, model expects ", input_width()));
  }
  Matrix out(features.rows(), output_width());
  std::vector<std::vector<double>> acts;
  for (size_t r = 0; r < features.rows(); ++r) {
    Forward(params_, features.Row(r), acts);
    std::vector<double>& y = acts.back();
    if (task_kind() == TaskKind::kClassification) Softmax(y);
    std::copy(y.begin(), y.end(), out.Row(r).begin());
  }
  return out;
}

}  // namespace campusfl
