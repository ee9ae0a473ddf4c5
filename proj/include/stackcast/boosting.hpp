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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stackcast/dataset.hpp"
#include "stackcast/tree.hpp"

namespace stackcast {

enum class BoostMode { plain, ordered };
enum class GrowPolicy { leaf_wise, depth_wise };

std::string to_string(BoostMode m);
std::string to_string(GrowPolicy g);
BoostMode parse_boost_mode(const std::string& s);
GrowPolicy parse_grow_policy(const std::string& s);

// Defaults follow a LightGBM-style configuration: 50 rounds, 100 leaves,
// depth 10, learning rate 0.001, 90% of features per tree.
struct BoostParams {
  int n_estimators = 50;
  double learning_rate = 0.001;
  int max_depth = 10;    // < 0: unlimited
  int max_leaves = 100;  // J; <= 0: unlimited (depth-wise only)
  double subsample = 1.0;
  double feature_fraction = 0.9;
  double l2_lambda = 0.0;
  double min_split_gain = 0.0;
  int min_samples_leaf = 20;
  double goss_top_fraction = 1.0;  // a; 1 disables GOSS
  double goss_rand_fraction = 0.0;  // b
  int max_bins = 255;
  GrowPolicy grow_policy = GrowPolicy::leaf_wise;
  BoostMode mode = BoostMode::ordered;  // ordered boosting only
  int n_permutations = 4;               // s; ordered boosting only
  double ts_prior_weight = 1.0;         // a_ts; ordered boosting only
  std::uint64_t seed = 0;

  /// CatBoost-style starting point for the ordered learner.
  static BoostParams ordered_defaults();

  void validate() const;
};

/// Argmin over w of G*w + (H + lambda)*w^2/2.
double leaf_newton_value(double sum_g, double sum_h, double lambda);

/// Loss reduction of splitting a node into (L, R), minus gamma.
double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma);

struct GossSample {
  std::vector<std::size_t> rows;  // ascending
  std::vector<double> weights;    // aligned with rows
};

/// Keep the ceil(a*n) largest |g| with weight 1 and ceil(b*n) uniform picks
/// from the rest with weight (1-a)/b.
GossSample goss_sample(std::span<const double> abs_gradients, double a, double b,
                       std::uint64_t seed);

/// Full-data target-statistic encoding of one categorical column.
struct CategoryEncoding {
  std::size_t feature = 0;
  double prior = 0.0;
  std::vector<double> encoded;  // per category code; unseen codes map to prior

  double encode(double code) const;
};

struct BoostModel {
  enum class Kind { gbdt, ordered };
  Kind kind = Kind::gbdt;
  std::size_t n_features = 0;
  double base_score = 0.0;
  double learning_rate = 0.0;
  std::vector<Tree> trees;
  std::vector<CategoryEncoding> encoders;  // ordered boosting only
  std::vector<double> train_loss;          // entry t: mean squared error after t trees

  double predict_row(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static BoostModel from_json(const nlohmann::json& j);
};

BoostModel fit_gbdt(const BinnedDataset& train, const BoostParams& p);

/// enc(i) = (sum of earlier same-category targets + a_ts * prior) / (count + a_ts),
/// "earlier" meaning earlier in `sigma` (sigma[k] is the row at position k).
std::vector<double> ordered_target_statistic(std::span<const double> codes,
                                             std::span<const double> targets,
                                             std::span<const std::size_t> sigma, double prior,
                                             double a_ts);

struct PermutationSet {
  std::vector<std::vector<std::size_t>> perms;  // each perms[r][k] = row at position k

  static PermutationSet random(std::size_t n_rows, int s, std::uint64_t seed);
  static PermutationSet identity(std::size_t n_rows);
};

/// Per-row leaf update: mean of `gradient` over every row in the same leaf.
std::vector<double> plain_leaf_updates(std::span<const int> leaf_of_row,
                                       std::span<const double> gradient);
/// Per-row leaf update: mean of `gradient` over same-leaf rows strictly
/// earlier in `sigma`; 0 when there are none.
std::vector<double> ordered_leaf_updates(std::span<const int> leaf_of_row,
                                         std::span<const double> gradient,
                                         std::span<const std::size_t> sigma);

BoostModel fit_ordered_boost(const Dataset& train, const BoostParams& p);
BoostModel fit_ordered_boost(const Dataset& train, const BoostParams& p,
                             const PermutationSet& perms);

std::vector<double> predict_boost(const BoostModel& model, const Matrix& x);

std::vector<double> impurity_importance(const BoostModel& model);

/// CSV (iteration, train_loss).
void write_loss_trace(const BoostModel& model, const std::filesystem::path& path);

}  // namespace stackcast
