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

namespace stackcast {

/// Settings for the synthetic emergency-department series.
///
/// The target for day t is
///
///   visits(t) = base
///             + trend_amplitude    * years_since_start(t)
///             + seasonal_amplitude * (weekly[weekday(t)] + 0.8 * cos(phase(t) - pi))
///             + climate_amplitude  * (0.8 * max(0, max_temp - 28)
///                                     - 0.25 * min(precipitation, 20)
///                                     + 0.05 * (humidity - 68.27))
///             + case_mix_amplitude * (icd_1 - 14.11)
///             + noise_amplitude    * N(0, 1)
///
/// with phase(t) = 2*pi*(day_of_year - 15)/365.25 (so the annual term peaks in
/// the southern-hemisphere winter) and weekly = {Mon 1.0, Tue 0.45, Wed 0.25,
/// Thu 0.15, Fri 0.0, Sat -0.6, Sun -0.35}. All other columns are exogenous:
/// climate follows the season, diagnosis and triage counts are Poisson with
/// seasonal rates, and every column is clipped to its documented range.
/// synth_ground_truth() evaluates the formula without the noise term.
struct SynthConfig {
  int n_days = 10000;
  std::uint64_t seed = 1;
  std::string start_date = "1999-01-01";
  double base = 120.0;
  double trend_amplitude = 4.0;
  double seasonal_amplitude = 15.0;
  double climate_amplitude = 1.0;
  double case_mix_amplitude = 0.6;
  double noise_amplitude = 8.0;
  std::string preset = "ed";

  /// Throws ConfigError; `max_delay` is the largest lag the caller will build.
  void validate(int max_delay = 0) const;
};

Dataset synth_generate(const SynthConfig& cfg);

/// Noise-free target of row `row` of a dataset produced by synth_generate.
double synth_ground_truth(const SynthConfig& cfg, const Dataset& d, std::size_t row);

struct FeatureGroup {
  std::string name;
  std::vector<std::string> features;
};

/// Named feature groups of the ED preset, mirroring the ablation table rows.
const std::vector<FeatureGroup>& ed_feature_groups();

/// Column schema of a CSV written from the ED preset.
std::vector<ColumnSchema> ed_schema();

struct ColumnRange {
  std::string name;
  double lo;
  double hi;
};

/// Documented ranges of the ED preset's bounded columns.
const std::vector<ColumnRange>& ed_column_ranges();

}  // namespace stackcast
