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

#include <algorithm>
#include <cmath>

#include "cart_builder.hpp"
#include "stackcast/error.hpp"
#include "stackcast/trees.hpp"

namespace stackcast {

std::string to_string(ForestMode m) {
  return m == ForestMode::random_forest ? "random_forest" : "extra_trees";
}

ForestMode parse_forest_mode(const std::string& s) {
  if (s == "random_forest") return ForestMode::random_forest;
  if (s == "extra_trees") return ForestMode::extra_trees;
  throw ConfigError("unknown forest mode '" + s + "'");
}

void ForestParams::validate() const {
  if (n_estimators < 1) throw ConfigError("forest: n_estimators must be >= 1");
  if (min_samples_split < 2) throw ConfigError("forest: min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw ConfigError("forest: min_samples_leaf must be >= 1");
  if (!(max_features > 0.0 && max_features <= 1.0)) {
    throw ConfigError("forest: max_features must be in (0, 1]");
  }
  if (max_bins != 0 && (max_bins < 2 || max_bins > 65535)) {
    throw ConfigError("forest: max_bins must be 0 or in [2, 65535]");
  }
}

Forest fit_forest(const Dataset& train, const ForestParams& p) {
  p.validate();
  if (train.empty()) throw DataError("fit_forest: empty dataset");
  const std::size_t n = train.n_rows();
  const std::size_t n_features = train.n_features();
  const auto sorted = p.max_bins > 0 ? detail::SortedFeatures::build_binned(train.x(), p.max_bins)
                                     : detail::SortedFeatures::build(train.x());
  detail::GrowParams g;
  g.max_depth = p.max_depth;
  g.min_samples_split = p.min_samples_split;
  g.min_samples_leaf = p.min_samples_leaf;
  g.n_candidates = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(p.max_features * static_cast<double>(n_features))));
  g.rule = p.mode == ForestMode::random_forest ? detail::SplitRule::best
                                               : detail::SplitRule::random;

  Forest model;
  model.n_features = n_features;
  model.mode = p.mode;
  model.trees.reserve(static_cast<std::size_t>(p.n_estimators));
  for (int t = 0; t < p.n_estimators; ++t) {
    Rng rng(mix_seed(p.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(n);
    if (p.mode == ForestMode::random_forest) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    }
    model.trees.push_back(detail::grow_tree(train.x(), train.y(), sorted, std::move(rows), g, &rng));
  }
  return model;
}

double predict_forest_row(const Forest& model, std::span<const double> x) {
  if (x.size() != model.n_features) throw DataError("predict_forest: feature count mismatch");
  double total = 0.0;
  for (const auto& tree : model.trees) total += tree.predict_row(x);
  return total / static_cast<double>(model.trees.size());
}

std::vector<double> predict_forest(const Forest& model, const Matrix& x) {
  if (x.cols() != model.n_features) throw DataError("predict_forest: feature count mismatch");
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_forest_row(model, x.row(i));
  return out;
}

std::vector<double> impurity_importance(const Forest& model) {
  std::vector<double> imp(model.n_features, 0.0);
  for (const auto& tree : model.trees) tree.accumulate_importance(imp);
  normalize_importance(imp);
  return imp;
}

}  // namespace stackcast
