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

#include "stackcast/boosting.hpp"
#include "stackcast/tree.hpp"

namespace stackcast::detail {

struct BinColumns {
  std::vector<const std::uint16_t*> codes;        // per feature, per row
  std::vector<const std::vector<double>*> edges;  // per feature
};

struct HistTreeParams {
  GrowPolicy policy = GrowPolicy::leaf_wise;
  int max_depth = -1;
  int max_leaves = 31;
  double l2_lambda = 0.0;
  double min_split_gain = 0.0;
  int min_samples_leaf = 1;
  std::vector<char> use_feature;  // empty: all
};

struct HistTree {
  Tree tree;
  std::vector<int> split_bin;  // per node; codes >= split_bin go right, -1 for leaves
};

// Per (feature, bin) sums of g and h plus the row count.
struct HistBin {
  double g = 0.0;
  double h = 0.0;
  double n = 0.0;
};

/// Histogram of `rows` over every feature, bins laid out feature after feature.
std::vector<HistBin> build_histogram(const BinColumns& cols, std::span<const std::size_t> rows,
                                     std::span<const double> g, std::span<const double> h);

/// Grow one tree on `rows`; g and h are indexed by row id. Leaf values are
/// Newton values of the rows reaching them.
HistTree grow_hist_tree(const BinColumns& cols, std::span<const std::size_t> rows,
                        std::span<const double> g, std::span<const double> h,
                        const HistTreeParams& p);

int leaf_of_row(const HistTree& t, const BinColumns& cols, std::size_t row);

}  // namespace stackcast::detail
