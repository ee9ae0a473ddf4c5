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
#include <span>
#include <string>
#include <vector>

#include "stackcast/matrix.hpp"

namespace stackcast {

/// Any fitted model viewed as a function of one feature row.
using ModelFn = std::function<double(std::span<const double>)>;

/// Attributions for one instance. Exact mode satisfies
/// base_value + sum(values) == prediction up to rounding.
struct ShapReport {
  std::vector<double> values;    // Omega_i per feature
  double base_value = 0.0;       // mean model output over the background
  double prediction = 0.0;
  std::vector<double> features;  // the instance

  /// (feature, value, shap) ordered by |shap| descending, ties by index.
  std::string waterfall_csv(const std::vector<std::string>& names) const;
};

constexpr std::size_t kMaxExactFeatures = 15;

/// `n` distinct rows drawn with a seeded shuffle, kept in source order;
/// every row when n >= x.rows().
Matrix background_rows(const Matrix& x, std::size_t n, std::uint64_t seed);

/// Subset enumeration with interventional imputation: features outside a
/// subset take each background row's value and the outputs are averaged.
/// Throws ConfigError above kMaxExactFeatures features.
ShapReport shap_exact(const ModelFn& model, std::span<const double> instance,
                      const Matrix& background);

/// Average over n_samples random feature orders of each feature's marginal
/// contribution when added to the preceding features.
ShapReport shap_sampled(const ModelFn& model, std::span<const double> instance,
                        const Matrix& background, std::size_t n_samples, std::uint64_t seed);

enum class ShapMode { automatic, exact, sampled };

std::string to_string(ShapMode m);
ShapMode parse_shap_mode(const std::string& s);

struct ShapSummary {
  Matrix attributions;              // rows x features
  std::vector<double> base_values;  // per row
  std::vector<double> predictions;  // per row
  std::vector<double> mean_abs;     // per feature
  std::vector<std::size_t> order;   // features by mean_abs descending, ties by index

  std::string summary_csv(const std::vector<std::string>& names) const;
  std::string matrix_csv(const std::vector<std::string>& names) const;
};

/// Attributions for every row of `rows`. automatic picks exact when the
/// feature count allows it.
ShapSummary shap_summary(const ModelFn& model, const Matrix& rows, const Matrix& background,
                         ShapMode mode, std::size_t n_samples, std::uint64_t seed);

}  // namespace stackcast
