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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stackcast {

/// The ten evaluation metrics over an (actual, predicted) pair.
///
/// MAPE and SMAPE are in percent. `medae` and `mda` follow the tabulated
/// definitions by default (mean absolute deviation of the actuals from their
/// mean; direction of actual(k) relative to predicted(k-1)); the conventional
/// variants are available through MetricOptions. A metric whose domain is
/// violated (MSLE with a value <= -1, MAPE with a zero actual, R with a
/// constant series) is left empty instead of failing the whole report.
struct MetricReport {
  std::optional<double> r;
  double evs = 0.0;
  double mae = 0.0;
  std::optional<double> msle;
  double rmse = 0.0;
  double smape = 0.0;
  double medae = 0.0;
  std::optional<double> mape;
  double mda = 0.0;
  double rse = 0.0;
  std::size_t n_samples = 0;

  /// (name, value) pairs in report order; undefined metrics map to NaN.
  std::vector<std::pair<std::string, double>> items() const;
};

struct MetricOptions {
  bool standard_medae = false;  // median |actual - predicted|
  bool standard_mda = false;    // sgn(actual(k)-actual(k-1)) vs sgn(pred(k)-pred(k-1))
};

/// Names of the ten metrics in report order.
const std::vector<std::string>& metric_names();

MetricReport compute_all(std::span<const double> actual, std::span<const double> predicted,
                         const MetricOptions& options = {});

/// Pearson correlation. Throws NumericError when either series is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

double mean_absolute_error(std::span<const double> actual, std::span<const double> predicted);

}  // namespace stackcast
