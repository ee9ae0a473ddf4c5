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
#include "stackcast/random.hpp"

namespace fixture {

// Numeric dataset from row vectors; time index 0..n-1.
inline stackcast::Dataset numeric(const std::vector<std::vector<double>>& rows,
                                  std::vector<double> y) {
  const std::size_t nf = rows.empty() ? 0 : rows[0].size();
  stackcast::Matrix x(rows.size(), nf);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < nf; ++j) x(r, j) = rows[r][j];
  }
  std::vector<stackcast::FeatureInfo> info(nf);
  for (std::size_t j = 0; j < nf; ++j) info[j].name = "x" + std::to_string(j);
  std::vector<std::int64_t> t(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) t[r] = static_cast<std::int64_t>(r);
  return {std::move(info), std::move(x), std::move(y), std::move(t), "y", "t"};
}

// n rows of nf uniform features in [0, 1) and y = f(row) + noise * N(0,1).
template <typename F>
stackcast::Dataset random_regression(std::size_t n, std::size_t nf, std::uint64_t seed, F f,
                                     double noise = 0.0) {
  stackcast::Rng rng(seed);
  std::vector<std::vector<double>> rows(n, std::vector<double>(nf));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& v : rows[r]) v = rng.uniform();
    y[r] = f(rows[r]) + noise * rng.normal();
  }
  return numeric(rows, std::move(y));
}

}  // namespace fixture
