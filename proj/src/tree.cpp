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

#include "stackcast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stackcast/serialize.hpp"

namespace stackcast {

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("Tree: no nodes");
  const int n = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (!std::isfinite(node.value)) throw std::invalid_argument("Tree: non-finite leaf value");
      continue;
    }
    if (node.left <= 0 || node.right <= 0 || node.left >= n || node.right >= n) {
      throw std::invalid_argument("Tree: internal node with invalid children");
    }
  }
}

std::size_t Tree::n_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& t) { return t.is_leaf(); }));
}

int Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // Children always follow their parent in storage order.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    best = std::max(best, d[i]);
    if (!node.is_leaf()) {
      d[node.left] = d[i] + 1;
      d[node.right] = d[i] + 1;
    }
  }
  return best;
}

int Tree::leaf_index(std::span<const double> x) const {
  int i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& node = nodes_[i];
    i = x[static_cast<std::size_t>(node.feature)] >= node.threshold ? node.right : node.left;
  }
  return i;
}

void Tree::accumulate_importance(std::span<double> importance) const {
  for (const auto& node : nodes_) {
    if (!node.is_leaf()) importance[static_cast<std::size_t>(node.feature)] += node.gain;
  }
}

nlohmann::json Tree::to_json() const {
  nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                 left = nlohmann::json::array(), right = nlohmann::json::array(),
                 value = nlohmann::json::array(), count = nlohmann::json::array(),
                 gain = nlohmann::json::array();
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(encode_real(n.threshold));
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(encode_real(n.value));
    count.push_back(n.n_samples);
    gain.push_back(encode_real(n.gain));
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
          {"value", value},     {"n_samples", count},     {"gain", gain}};
}

Tree Tree::from_json(const nlohmann::json& j) {
  const auto& feature = j.at("feature");
  std::vector<TreeNode> nodes(feature.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& n = nodes[i];
    n.feature = feature.at(i).get<int>();
    n.threshold = decode_real(j.at("threshold").at(i));
    n.left = j.at("left").at(i).get<int>();
    n.right = j.at("right").at(i).get<int>();
    n.value = decode_real(j.at("value").at(i));
    n.n_samples = j.at("n_samples").at(i).get<std::size_t>();
    n.gain = decode_real(j.at("gain").at(i));
  }
  return Tree(std::move(nodes));
}

void normalize_importance(std::span<double> importance) {
  double total = 0.0;
  for (double v : importance) total += v;
  if (total <= 0.0) {
    std::fill(importance.begin(), importance.end(), 0.0);
    return;
  }
  for (double& v : importance) v /= total;
}

}  // namespace stackcast
