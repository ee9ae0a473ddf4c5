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

#include <algorithm>
#include <cmath>
#include <vector>

#include "stackcast/random.hpp"

namespace stackcast::detail {

// Sorted row subset of size round(fraction * n), at least 1; all rows at 1.
inline std::vector<std::size_t> sample_rows(std::size_t n, double fraction, Rng& rng) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  if (fraction >= 1.0) return rows;
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n);
  for (std::size_t i = 0; i < k; ++i) std::swap(rows[i], rows[i + rng.below(n - i)]);
  rows.resize(k);
  std::sort(rows.begin(), rows.end());
  return rows;
}

// Per-tree feature mask keeping floor(fraction * p) features, at least 1.
inline std::vector<char> sample_features(std::size_t p, double fraction, Rng& rng) {
  if (fraction >= 1.0) return {};
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(p))), 1, p);
  std::vector<std::size_t> idx(p);
  for (std::size_t i = 0; i < p; ++i) idx[i] = i;
  std::vector<char> mask(p, 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + rng.below(p - i)]);
    mask[idx[i]] = 1;
  }
  return mask;
}

inline double mean_squared_error(const std::vector<double>& f, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (f[i] - y[i]) * (f[i] - y[i]);
  return s / static_cast<double>(y.size());
}

}  // namespace stackcast::detail
