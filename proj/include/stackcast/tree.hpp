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

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace stackcast {

// A node is a leaf iff feature < 0. Rows with x[feature] >= threshold go right.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t n_samples = 0;
  double gain = 0.0;  // weighted impurity decrease of the split (0 for leaves)

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t n_leaves() const;
  int depth() const;

  /// Index of the leaf reached by `x`.
  int leaf_index(std::span<const double> x) const;
  double predict_row(std::span<const double> x) const { return nodes_[leaf_index(x)].value; }

  /// Add each split's gain to importance[feature].
  void accumulate_importance(std::span<double> importance) const;

  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Scale a non-negative vector to sum 1 (left all-zero if it sums to 0).
void normalize_importance(std::span<double> importance);

}  // namespace stackcast
