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


#include "stackcast/artifact.hpp"

#include "stackcast/config.hpp"
#include "stackcast/error.hpp"
#include "stackcast/report.hpp"

namespace stackcast {

std::string schema_fingerprint(std::span<const ColumnSchema> schema) {
  std::string text;
  for (const auto& c : schema) text += c.name + '\x1f' + to_string(c.kind) + '\x1f' + to_string(c.role) + '\n';
  return hex64(fnv1a64(text));
}

double ModelArtifact::predict_row(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.predict_row(x); }, model);
}

std::vector<double> ModelArtifact::predict(const Matrix& x) const {
  if (x.cols() != feature_names.size()) {
    throw DataError("model expects " + std::to_string(feature_names.size()) + " features, got " +
                    std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_row(x.row(r));
  return out;
}

nlohmann::json ModelArtifact::to_json() const {
  nlohmann::json schema_j = nlohmann::json::array();
  for (const auto& c : schema) {
    schema_j.push_back({{"name", c.name}, {"kind", to_string(c.kind)}, {"role", to_string(c.role)}});
  }
  nlohmann::json model_j = std::visit([](const auto& m) { return m.to_json(); }, model);
  return {{"format_version", format_version},
          {"kind", kind},
          {"schema_fingerprint", schema_fingerprint},
          {"seed", seed},
          {"config_hash", config_hash},
          {"schema", schema_j},
          {"feature_names", feature_names},
          {"codes", codes},
          {"lags", lags.delays},
          {"model", model_j}};
}

ModelArtifact ModelArtifact::from_json(const nlohmann::json& j) {
  ModelArtifact a;
  a.format_version = j.at("format_version").get<int>();
  if (a.format_version != kArtifactFormatVersion) {
    throw DataError("model artifact: unsupported format_version " + std::to_string(a.format_version));
  }
  a.kind = j.at("kind").get<std::string>();
  a.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& c : j.at("schema")) {
    a.schema.push_back({c.at("name").get<std::string>(), parse_column_kind(c.at("kind").get<std::string>()),
                        parse_column_role(c.at("role").get<std::string>())});
  }
  if (stackcast::schema_fingerprint(a.schema) != a.schema_fingerprint) {
    throw DataError("model artifact: schema fingerprint mismatch");
  }
  a.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  a.codes = j.at("codes").get<CodeMaps>();
  a.lags.delays = j.at("lags").get<std::vector<int>>();
  if (a.kind == "stack") {
    a.model = StackedModel::from_json(j.at("model"));
  } else {
    a.model = Regressor::from_json(j.at("model"));
  }
  return a;
}

void save_artifact(const ModelArtifact& a, const std::filesystem::path& path) {
  write_text(path, a.to_json().dump(1) + "\n");
}

ModelArtifact load_artifact(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("model file '" + path.string() + "' not found");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file '" + path.string() + "': " + e.what());
  }
  try {
    return ModelArtifact::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file '" + path.string() + "': " + e.what());
  }
}

}  // namespace stackcast
