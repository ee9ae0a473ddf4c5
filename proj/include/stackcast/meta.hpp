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
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackcast/learner.hpp"

namespace stackcast {

enum class OofMode { contiguous_blocks, forward_chain };
enum class MasterKind { mlp, linear, ridge };

std::string to_string(OofMode m);
std::string to_string(MasterKind m);
OofMode parse_oof_mode(const std::string& s);
MasterKind parse_master_kind(const std::string& s);

struct OofScheme {
  int n_folds = 5;
  OofMode mode = OofMode::contiguous_blocks;
};

struct MasterSpec {
  MasterKind kind = MasterKind::mlp;
  MlpArch arch{{16}};
  MlpTrainConfig mlp{1e-3, 200, 32, 1e-4};
  double ridge_alpha = 1.0;

  LearnerSpec learner_spec() const;
};

/// Fit on the first dataset, predict the rows of the second.
using FitPredict = std::function<std::vector<double>(const Dataset& fit, const Dataset& predict)>;

/// Row range [begin, end) of block k when n rows are cut into n_folds
/// contiguous blocks.
std::pair<std::size_t, std::size_t> oof_block(std::size_t n, int n_folds, int k);

/// Out-of-fold predictions. contiguous_blocks: each block is predicted by a
/// model fit on every other block. forward_chain: block k by a model fit on
/// blocks before it; block 0 gets the mean target of all rows.
std::vector<double> oof_predictions(const Dataset& train, const FitPredict& learner,
                                    const OofScheme& scheme);
std::vector<double> oof_predictions(const Dataset& train, const LearnerSpec& spec,
                                    const OofScheme& scheme, std::uint64_t seed);

/// Sub-learner kinds allowed in a stack; each at most once.
void validate_stack(const std::vector<LearnerSpec>& specs);

/// n_rows x n_specs matrix of out-of-fold predictions, columns in spec order.
Matrix build_meta_features(const Dataset& train, const std::vector<LearnerSpec>& specs,
                           const OofScheme& scheme, std::uint64_t seed);

/// Every sub-learner refit on all of `train`.
std::vector<Regressor> fit_sub_learners(const Dataset& train, const std::vector<LearnerSpec>& specs,
                                        std::uint64_t seed);

Regressor fit_master(const Matrix& meta, std::span<const double> y, const MasterSpec& master,
                     std::uint64_t seed);

struct StackedModel {
  std::vector<Regressor> subs;
  Regressor master;
  MasterKind master_kind = MasterKind::mlp;
  OofScheme oof;
  std::size_t n_features = 0;

  /// Sub-model predictions for one row, in stack order.
  std::vector<double> level0(std::span<const double> x) const;
  double predict_row(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static StackedModel from_json(const nlohmann::json& j);
};

StackedModel fit_meta(const Dataset& train, const std::vector<LearnerSpec>& specs,
                      const MasterSpec& master, const OofScheme& scheme, std::uint64_t seed);

std::vector<double> predict_meta(const StackedModel& model, const Matrix& x);

/// The four default sub-learners: histogram GBDT, ordered boosting, random
/// forest and extra trees.
std::vector<LearnerSpec> default_stack();

}  // namespace stackcast
