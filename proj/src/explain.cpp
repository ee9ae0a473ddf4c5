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


#include "stackcast/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "stackcast/error.hpp"
#include "stackcast/random.hpp"
#include "stackcast/report.hpp"

namespace stackcast {

namespace {

void check_inputs(std::span<const double> instance, const Matrix& background) {
  if (background.empty()) throw ConfigError("shap: background set is empty");
  if (background.cols() != instance.size()) {
    throw DataError("shap: background has " + std::to_string(background.cols()) +
                    " features, instance has " + std::to_string(instance.size()));
  }
  if (instance.empty()) throw DataError("shap: instance has no features");
}

double mean_output(const ModelFn& model, const Matrix& z) {
  double s = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) s += model(z.row(r));
  return s / static_cast<double>(z.rows());
}

std::vector<std::size_t> by_abs_desc(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
  return order;
}

}  // namespace

Matrix background_rows(const Matrix& x, std::size_t n, std::uint64_t seed) {
  if (x.empty()) throw DataError("background: no rows to sample from");
  if (n == 0) throw ConfigError("background: size must be >= 1");
  if (n >= x.rows()) return x;
  Rng rng(seed);
  auto perm = rng.permutation(x.rows());
  perm.resize(n);
  std::sort(perm.begin(), perm.end());
  return x.take_rows(perm);
}

ShapReport shap_exact(const ModelFn& model, std::span<const double> instance,
                      const Matrix& background) {
  check_inputs(instance, background);
  const std::size_t nf = instance.size();
  if (nf > kMaxExactFeatures) {
    throw ConfigError("shap_exact: " + std::to_string(nf) + " features exceed the exact limit of " +
                      std::to_string(kMaxExactFeatures) + "; use sampled mode");
  }
  const std::size_t n_subsets = std::size_t{1} << nf;
  std::vector<double> v(n_subsets);
  Matrix z = background;
  for (std::size_t mask = 0; mask < n_subsets; ++mask) {
    for (std::size_t r = 0; r < z.rows(); ++r) {
      for (std::size_t j = 0; j < nf; ++j) z(r, j) = (mask >> j) & 1 ? instance[j] : background(r, j);
    }
    v[mask] = mean_output(model, z);
  }
  ShapReport rep;
  rep.features.assign(instance.begin(), instance.end());
  rep.prediction = model(instance);
  v[n_subsets - 1] = rep.prediction;
  rep.base_value = v[0];

  // weight(s) = s! (nf - s - 1)! / nf!
  std::vector<double> fact(nf + 1, 1.0);
  for (std::size_t k = 1; k <= nf; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
  std::vector<double> weight(nf);
  for (std::size_t s = 0; s < nf; ++s) weight[s] = fact[s] * fact[nf - s - 1] / fact[nf];

  rep.values.assign(nf, 0.0);
  for (std::size_t i = 0; i < nf; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double acc = 0.0;
    for (std::size_t mask = 0; mask < n_subsets; ++mask) {
      if (mask & bit) continue;
      acc += weight[static_cast<std::size_t>(std::popcount(mask))] * (v[mask | bit] - v[mask]);
    }
    rep.values[i] = acc;
  }
  return rep;
}

ShapReport shap_sampled(const ModelFn& model, std::span<const double> instance,
                        const Matrix& background, std::size_t n_samples, std::uint64_t seed) {
  check_inputs(instance, background);
  if (n_samples == 0) throw ConfigError("shap_sampled: n_samples must be >= 1");
  const std::size_t nf = instance.size();
  ShapReport rep;
  rep.features.assign(instance.begin(), instance.end());
  rep.prediction = model(instance);
  rep.base_value = mean_output(model, background);
  rep.values.assign(nf, 0.0);

  Rng rng(seed);
  Matrix z(background.rows(), nf);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto perm = rng.permutation(nf);
    z = background;
    double prev = rep.base_value;
    for (std::size_t k = 0; k < nf; ++k) {
      const std::size_t j = perm[k];
      for (std::size_t r = 0; r < z.rows(); ++r) z(r, j) = instance[j];
      const double cur = k + 1 == nf ? rep.prediction : mean_output(model, z);
      rep.values[j] += cur - prev;
      prev = cur;
    }
  }
  for (double& v : rep.values) v /= static_cast<double>(n_samples);
  return rep;
}

std::string ShapReport::waterfall_csv(const std::vector<std::string>& names) const {
  if (names.size() != values.size()) throw std::invalid_argument("waterfall_csv: name count mismatch");
  CsvTable t({"feature", "value", "shap"});
  for (std::size_t i : by_abs_desc(values)) {
    t.add_row({names[i], format_real(features[i]), format_real(values[i])});
  }
  return t.str();
}

std::string to_string(ShapMode m) {
  switch (m) {
    case ShapMode::automatic: return "auto";
    case ShapMode::exact: return "exact";
    case ShapMode::sampled: return "sampled";
  }
  return "unknown";
}

ShapMode parse_shap_mode(const std::string& s) {
  if (s == "auto") return ShapMode::automatic;
  if (s == "exact") return ShapMode::exact;
  if (s == "sampled") return ShapMode::sampled;
  throw ConfigError("unknown shap mode '" + s + "'");
}

ShapSummary shap_summary(const ModelFn& model, const Matrix& rows, const Matrix& background,
                         ShapMode mode, std::size_t n_samples, std::uint64_t seed) {
  if (rows.empty()) throw DataError("shap_summary: no rows to explain");
  const std::size_t nf = rows.cols();
  const bool exact = mode == ShapMode::exact || (mode == ShapMode::automatic && nf <= kMaxExactFeatures);
  ShapSummary out;
  out.attributions = Matrix(rows.rows(), nf);
  out.mean_abs.assign(nf, 0.0);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const ShapReport rep = exact ? shap_exact(model, rows.row(r), background)
                                 : shap_sampled(model, rows.row(r), background, n_samples,
                                                mix_seed(seed, r));
    for (std::size_t j = 0; j < nf; ++j) {
      out.attributions(r, j) = rep.values[j];
      out.mean_abs[j] += std::abs(rep.values[j]);
    }
    out.base_values.push_back(rep.base_value);
    out.predictions.push_back(rep.prediction);
  }
  for (double& m : out.mean_abs) m /= static_cast<double>(rows.rows());
  out.order = by_abs_desc(out.mean_abs);
  return out;
}

std::string ShapSummary::summary_csv(const std::vector<std::string>& names) const {
  if (names.size() != mean_abs.size()) throw std::invalid_argument("summary_csv: name count mismatch");
  CsvTable t({"feature", "mean_abs_shap"});
  for (std::size_t j : order) t.add_row({names[j], format_real(mean_abs[j])});
  return t.str();
}

std::string ShapSummary::matrix_csv(const std::vector<std::string>& names) const {
  if (names.size() != attributions.cols()) throw std::invalid_argument("matrix_csv: name count mismatch");
  std::vector<std::string> header{"row", "base_value", "prediction"};
  header.insert(header.end(), names.begin(), names.end());
  CsvTable t(std::move(header));
  for (std::size_t r = 0; r < attributions.rows(); ++r) {
    std::vector<std::string> cells{std::to_string(r), format_real(base_values[r]),
                                   format_real(predictions[r])};
    for (std::size_t j = 0; j < attributions.cols(); ++j) cells.push_back(format_real(attributions(r, j)));
    t.add_row(std::move(cells));
  }
  return t.str();
}

}  // namespace stackcast
