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
#include <functional>
#include <string>
#include <vector>

#include "stackcast/learner.hpp"
#include "stackcast/meta.hpp"
#include "stackcast/synth.hpp"

namespace stackcast {

struct RfeStep {
  std::size_t n_features = 0;
  double valid_r = 0.0;  // NaN when undefined
  double valid_mae = 0.0;
  std::vector<std::size_t> eliminated;  // original feature indices dropped after this fit
};

struct RfeResult {
  std::vector<std::size_t> selected;  // ascending original indices
  // 1 for survivors; features dropped in later rounds rank closer to 1.
  std::vector<int> ranking;
  std::vector<RfeStep> steps;

  std::string curve_csv() const;
  std::string ranking_csv(const std::vector<std::string>& feature_names) const;
};

/// Recursive feature elimination: fit, drop the min(step, current - target_k)
/// least important features (ties broken by lower index first), repeat until
/// target_k remain. Learners without an importance notion are rejected.
RfeResult rfe(const Dataset& train, const Dataset& valid, const LearnerSpec& spec,
              std::size_t target_k, std::size_t step = 1);

struct FeatureSet {
  std::string name;
  std::vector<std::size_t> features;
};

/// Resolve named groups against a dataset's feature names. Names absent from
/// the dataset are an error.
std::vector<FeatureSet> resolve_groups(const Dataset& d, const std::vector<FeatureGroup>& groups);

/// (r_full - r_ablated) / r_ablated * 100.
double impact_percent(double r_full, double r_ablated);

struct AblationRow {
  std::string group;
  std::vector<std::size_t> excluded;
  double r_ablated = 0.0;
  double impact_percent = 0.0;
};

struct AblationReport {
  double r_full = 0.0;
  std::vector<AblationRow> rows;  // input group order

  std::string to_csv() const;
};

/// Test R of a model fit on `train` and scored on `test`.
using ScoreFn = std::function<double(const Dataset& train, const Dataset& test)>;

AblationReport ablate_groups(const Dataset& train, const Dataset& test,
                             const std::vector<FeatureSet>& groups, const ScoreFn& score);

/// Ablation of the stacked model.
AblationReport ablate_groups(const Dataset& train, const Dataset& test,
                             const std::vector<FeatureSet>& groups,
                             const std::vector<LearnerSpec>& specs, const MasterSpec& master,
                             const OofScheme& scheme, std::uint64_t seed);

}  // namespace stackcast
