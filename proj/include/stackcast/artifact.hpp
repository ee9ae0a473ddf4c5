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
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stackcast/dataset.hpp"
#include "stackcast/learner.hpp"
#include "stackcast/meta.hpp"

namespace stackcast {

constexpr int kArtifactFormatVersion = 1;

/// A trained model plus what is needed to rebuild its feature rows.
struct ModelArtifact {
  int format_version = kArtifactFormatVersion;
  std::string kind;  // "stack" or a learner kind
  std::string schema_fingerprint;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<ColumnSchema> schema;
  std::vector<std::string> feature_names;  // after lagging, in model column order
  CodeMaps codes;
  LagSpec lags;
  std::variant<Regressor, StackedModel> model;

  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& x) const;

  nlohmann::json to_json() const;
  static ModelArtifact from_json(const nlohmann::json& j);
};

std::string schema_fingerprint(std::span<const ColumnSchema> schema);

void save_artifact(const ModelArtifact& a, const std::filesystem::path& path);
/// Throws DataError on unreadable files, version or fingerprint mismatches.
ModelArtifact load_artifact(const std::filesystem::path& path);

}  // namespace stackcast
