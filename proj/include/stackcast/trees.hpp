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
#include <string>
#include <vector>

#include "stackcast/dataset.hpp"
#include "stackcast/tree.hpp"

namespace stackcast {

struct CartParams {
  int max_depth = -1;  // < 0: unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;

  void validate() const;
};

enum class ForestMode { random_forest, extra_trees };

std::string to_string(ForestMode m);
ForestMode parse_forest_mode(const std::string& s);

struct ForestParams {
  int n_estimators = 100;
  int max_depth = -1;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  double max_features = 1.0;  // fraction of features tried per node
  ForestMode mode = ForestMode::random_forest;
  // > 0: best-split search over at most this many quantile bins per feature
  // (exact midpoints when a feature has no more distinct values); 0: exact.
  int max_bins = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Greedy variance-reduction regression tree over all rows and features.
Tree fit_cart(const Dataset& train, const CartParams& p);

struct Forest {
  std::vector<Tree> trees;
  std::size_t n_features = 0;
  ForestMode mode = ForestMode::random_forest;
};

Forest fit_forest(const Dataset& train, const ForestParams& p);
std::vector<double> predict_forest(const Forest& model, const Matrix& x);
double predict_forest_row(const Forest& model, std::span<const double> x);

/// Per-feature sum of split gains, normalized to sum 1 (all zero without splits).
std::vector<double> impurity_importance(const Tree& tree, std::size_t n_features);
std::vector<double> impurity_importance(const Forest& model);

}  // namespace stackcast
