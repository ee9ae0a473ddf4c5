// Copyright 2026 The Stackcast Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "stackcast/dataset.hpp"

namespace stackcast {

struct MlpArch {
  std::vector<int> hidden_sizes{200, 20};  // ReLU layers; the output unit is linear

  void validate() const;
};

struct MlpTrainConfig {
  double learning_rate = 1e-4;
  int max_epochs = 1000;
  int batch_size = 32;
  double l2_alpha = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

// Fully connected ReLU network with one linear output. Inputs are scaled by
// the stored per-feature mean and scale and the output is mapped back through
// the stored target mean and scale.
struct MlpModel {
  std::vector<int> sizes;       // input, hidden..., 1
  std::vector<double> params;   // per layer: weights (out x in, row-major), then biases
  std::vector<double> x_mean, x_scale;
  double y_mean = 0.0;
  double y_scale = 1.0;
  std::vector<double> loss_trace;  // entry e: training loss after e epochs

  std::size_t n_features() const { return sizes.empty() ? 0 : static_cast<std::size_t>(sizes[0]); }
  std::size_t n_layers() const { return sizes.size() - 1; }
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;

  /// Network with all parameters zero and identity scaling.
  static MlpModel zeros(std::span<const int> sizes);

  double predict_row(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static MlpModel from_json(const nlohmann::json& j);
};

MlpModel fit_mlp(const Dataset& train, const MlpArch& arch, const MlpTrainConfig& cfg);
MlpModel fit_mlp(const Matrix& x, std::span<const double> y, const MlpArch& arch,
                 const MlpTrainConfig& cfg);

std::vector<double> predict_mlp(const MlpModel& model, const Matrix& x);

/// Training objective on a batch: half the mean squared error in scaled
/// target units plus l2_alpha/2 times the squared weight norm (biases are not
/// penalized). Writes d(loss)/d(params) to `grad` when non-null.
double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const double> y, double l2_alpha,
                std::vector<double>* grad);

/// Largest relative gap between the analytic gradient and central
/// differences with step `epsilon`, over every parameter.
double gradient_check(const MlpModel& model, const Matrix& x, std::span<const double> y,
                      double epsilon, double l2_alpha = 0.0);

}  // namespace stackcast
