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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stackcast/boosting.hpp"
#include "stackcast/dataset.hpp"
#include "stackcast/linear.hpp"
#include "stackcast/mlp.hpp"
#include "stackcast/trees.hpp"

namespace stackcast {

enum class LearnerKind { cart, random_forest, extra_trees, gbdt, ordered_boost, mlp, linear, ridge };

std::string to_string(LearnerKind k);
LearnerKind parse_learner_kind(const std::string& s);

// Every parameter block; only the one matching `kind` is read.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::gbdt;
  CartParams cart;
  ForestParams forest;
  BoostParams boost;
  MlpArch arch;
  MlpTrainConfig mlp;
  double ridge_alpha = 1.0;

  static LearnerSpec of(LearnerKind kind);
  void validate() const;
  /// Copy with the learner's seed replaced.
  LearnerSpec with_seed(std::uint64_t seed) const;
};

// A fitted model of any single-learner kind behind one predict interface.
class Regressor {
 public:
  using Model = std::variant<Tree, Forest, BoostModel, MlpModel, LinearModel>;

  Regressor() = default;
  Regressor(LearnerKind kind, std::size_t n_features, Model model)
      : kind_(kind), n_features_(n_features), model_(std::move(model)) {}

  LearnerKind kind() const noexcept { return kind_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const Model& model() const noexcept { return model_; }

  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& x) const;

  /// Normalized impurity importance for tree learners, |w| (normalized) for
  /// linear and ridge; nullopt for the MLP.
  std::optional<std::vector<double>> importance() const;

  nlohmann::json to_json() const;
  static Regressor from_json(const nlohmann::json& j);

 private:
  LearnerKind kind_ = LearnerKind::linear;
  std::size_t n_features_ = 0;
  Model model_;
};

Regressor fit_learner(const Dataset& train, const LearnerSpec& spec);

}  // namespace stackcast
