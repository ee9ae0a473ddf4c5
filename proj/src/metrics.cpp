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

#include "stackcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stackcast/error.hpp"
#include "stackcast/kernels.hpp"

namespace stackcast {
namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

void check_lengths(std::span<const double> a, std::span<const double> p) {
  if (a.size() != p.size()) {
    throw std::invalid_argument("metrics: actual has " + std::to_string(a.size()) +
                                " values, predicted has " + std::to_string(p.size()));
  }
}

double mean(std::span<const double> x) {
  return kernels::sum(x) / static_cast<double>(x.size());
}

// Population variance.
double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

}  // namespace

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"r",     "evs",   "mae",  "msle", "rmse",
                                              "smape", "medae", "mape", "mda",  "rse"};
  return names;
}

std::vector<std::pair<std::string, double>> MetricReport::items() const {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  return {{"r", r.value_or(nan)}, {"evs", evs},     {"mae", mae},
          {"msle", msle.value_or(nan)}, {"rmse", rmse},   {"smape", smape},
          {"medae", medae},       {"mape", mape.value_or(nan)}, {"mda", mda},
          {"rse", rse}};
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  if (x.size() < 2) throw std::invalid_argument("pearson_r: need at least two samples");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw NumericError("pearson_r: correlation undefined for a constant series");
  }
  const double r = (sxy / n) / (std::sqrt(sxx / n) * std::sqrt(syy / n));
  return std::clamp(r, -1.0, 1.0);
}

double mean_absolute_error(std::span<const double> actual, std::span<const double> predicted) {
  check_lengths(actual, predicted);
  if (actual.empty()) throw std::invalid_argument("mean_absolute_error: empty input");
  return kernels::sum_abs_diff(actual, predicted) / static_cast<double>(actual.size());
}

MetricReport compute_all(std::span<const double> actual, std::span<const double> predicted,
                         const MetricOptions& options) {
  check_lengths(actual, predicted);
  const std::size_t n = actual.size();
  if (n < 2) throw std::invalid_argument("compute_all: need at least two samples");
  const double nd = static_cast<double>(n);

  MetricReport rep;
  rep.n_samples = n;

  try {
    rep.r = pearson_r(predicted, actual);
  } catch (const NumericError&) {
    rep.r.reset();
  }

  std::vector<double> residual(n);
  for (std::size_t k = 0; k < n; ++k) residual[k] = actual[k] - predicted[k];
  const double var_actual = variance(actual);
  rep.evs = 1.0 - variance(residual) / var_actual;

  const double sq = kernels::sum_sq_diff(actual, predicted);
  rep.mae = kernels::sum_abs_diff(actual, predicted) / nd;
  rep.rmse = std::sqrt(sq / nd);

  bool msle_defined = true;
  double msle = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (actual[k] <= -1.0 || predicted[k] <= -1.0) {
      msle_defined = false;
      break;
    }
    const double d = std::log1p(actual[k]) - std::log1p(predicted[k]);
    msle += d * d;
  }
  if (msle_defined) rep.msle = msle / nd;

  double smape = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double denom = 0.5 * (actual[k] + predicted[k]);
    const double num = std::fabs(actual[k] - predicted[k]);
    // 0/0 when both are zero: a perfect prediction contributes nothing.
    if (num != 0.0) smape += num / std::fabs(denom);
  }
  rep.smape = smape / nd * 100.0;

  const double mu = mean(actual);
  if (options.standard_medae) {
    std::vector<double> abs_err(n);
    for (std::size_t k = 0; k < n; ++k) abs_err[k] = std::fabs(residual[k]);
    std::sort(abs_err.begin(), abs_err.end());
    rep.medae = (n % 2 == 1) ? abs_err[n / 2] : 0.5 * (abs_err[n / 2 - 1] + abs_err[n / 2]);
  } else {
    double dev = 0.0;
    for (double a : actual) dev += std::fabs(a - mu);
    rep.medae = dev / nd;
  }

  bool mape_defined = true;
  double mape = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (actual[k] == 0.0) {
      mape_defined = false;
      break;
    }
    mape += std::fabs((actual[k] - predicted[k]) / actual[k]);
  }
  if (mape_defined) rep.mape = mape / nd * 100.0;

  std::size_t hits = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const int observed = options.standard_mda ? sgn(actual[k] - actual[k - 1])
                                              : sgn(actual[k] - predicted[k - 1]);
    if (observed == sgn(predicted[k] - predicted[k - 1])) ++hits;
  }
  rep.mda = static_cast<double>(hits) / static_cast<double>(n - 1);

  double ss_tot = 0.0;
  for (double a : actual) ss_tot += (mu - a) * (mu - a);
  rep.rse = sq / ss_tot;
  return rep;
}

}  // namespace stackcast
