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
#include <map>
#include <string>
#include <vector>

#include "stackcast/dataset.hpp"
#include "stackcast/explain.hpp"
#include "stackcast/learner.hpp"
#include "stackcast/meta.hpp"
#include "stackcast/synth.hpp"
#include "stackcast/tuner.hpp"

namespace stackcast {

struct DataConfig {
  std::string path;
  std::string preset = "ed";  // "ed": the synthetic schema; "none": infer from the header
  std::string target = "visits";
  std::string time_index = "date";
  std::vector<std::string> categorical;
  std::vector<std::string> binary;
  std::vector<std::string> ignore;
};

struct StackConfig {
  std::string model = "stack";  // "stack" or a single learner kind
  std::vector<LearnerKind> learners{LearnerKind::gbdt, LearnerKind::ordered_boost,
                                    LearnerKind::random_forest, LearnerKind::extra_trees};
  std::map<LearnerKind, LearnerSpec> params;  // per kind; filled for every kind
  MasterSpec master;
  OofScheme oof;

  bool is_stack() const { return model == "stack"; }
  std::vector<LearnerSpec> stack_specs() const;
  LearnerSpec single_spec() const;
};

struct TunerConfig {
  std::string method = "dno";  // dno | grid
  LearnerKind learner = LearnerKind::gbdt;
  DnoConfig dno;
  int holdout_blocks = 5;
  std::string grid_x = "learning_rate";
  std::string grid_y = "n_estimators";
  int grid_nx = 5;
  int grid_ny = 5;
};

struct RfeConfig {
  LearnerKind learner = LearnerKind::gbdt;
  std::size_t target_k = 20;
  std::size_t step = 1;
  double valid_fraction = 0.2;  // tail of the training split
};

struct AblateConfig {
  std::string preset = "ed";  // "ed" or "none"; explicit groups are added after the preset's
  std::vector<FeatureGroup> groups;
};

struct ExplainConfig {
  std::size_t rows = 5;         // leading test rows to explain
  std::size_t background = 20;  // seeded training rows
  std::size_t samples = 20;     // permutations per row in sampled mode
  ShapMode mode = ShapMode::automatic;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string out = "out";
  DataConfig data;
  LagSpec lags = LagSpec::defaults();
  double test_fraction = 0.2;
  StackConfig stack;
  TunerConfig tuner;
  RfeConfig rfe;
  AblateConfig ablate;
  ExplainConfig explain;

  // Every key as given (after overrides), "section.key=value" per line, sorted.
  std::string canonical;

  /// FNV-1a of `canonical`, hex.
  std::string hash() const;
};

/// Parse TOML-style text, then apply "section.key=value" overrides.
/// Unknown keys and malformed values throw ConfigError naming the key.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Column schema for a config's data block; reads the CSV header unless a
/// preset is used.
std::vector<ColumnSchema> resolve_schema(const DataConfig& data);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace stackcast
