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

#include <span>
#include <vector>

#include "json.hpp"
#include "stackcast/matrix.hpp"

namespace stackcast {

struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;

  double predict_row(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);
};

/// Least squares with an unpenalized intercept and penalty l2 * |w|^2.
/// At l2 = 0 a rank-deficient (centered) design throws NumericError.
LinearModel fit_linear(const Matrix& x, std::span<const double> y, double l2);

std::vector<double> predict_linear(const LinearModel& m, const Matrix& x);

}  // namespace stackcast
