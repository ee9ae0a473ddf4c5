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

#include "stackcast/matrix.hpp"
#include "stackcast/random.hpp"
#include "stackcast/tree.hpp"

namespace stackcast::detail {

// Per feature: each row's level (its index among the sorted distinct values,
// or its quantile bin when binned) plus a column-major copy of the values.
struct SortedFeatures {
  bool binned = false;
  std::vector<std::vector<double>> values;  // exact: sorted distinct values; binned: bin edges
  std::vector<std::vector<std::uint32_t>> rank;
  std::vector<std::vector<double>> columns;

  std::size_t n_levels(std::size_t f) const {
    return binned ? values[f].size() + 1 : values[f].size();
  }
  /// Threshold separating level `lo` from the next occupied level `hi`.
  double threshold(std::size_t f, std::size_t lo, std::size_t hi) const;

  static SortedFeatures build(const Matrix& x);
  static SortedFeatures build_binned(const Matrix& x, int max_bins);
};

enum class SplitRule { best, random };

struct GrowParams {
  int max_depth = -1;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  std::size_t n_candidates = 0;  // features tried per node; 0 = all
  SplitRule rule = SplitRule::best;
};

/// Grow one variance-reduction tree on `rows` (repeats allowed). `rng` is
/// used for candidate features and random thresholds and may be null when
/// every feature is tried with the best rule.
Tree grow_tree(const Matrix& x, std::span<const double> y, const SortedFeatures& sorted,
               std::vector<std::size_t> rows, const GrowParams& p, Rng* rng);

}  // namespace stackcast::detail
