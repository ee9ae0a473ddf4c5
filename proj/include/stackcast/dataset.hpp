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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stackcast/matrix.hpp"

namespace stackcast {

enum class ColumnKind { numeric, categorical, binary };
enum class ColumnRole { feature, target, time_index, ignored };

std::string to_string(ColumnKind kind);
std::string to_string(ColumnRole role);
ColumnKind parse_column_kind(const std::string& s);
ColumnRole parse_column_role(const std::string& s);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnRole role = ColumnRole::feature;

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

/// Exactly one target, at most one time index, unique names. Throws ConfigError.
void validate_schema(std::span<const ColumnSchema> schema);

struct FeatureInfo {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  // Category labels in code order (first-appearance order at ingestion).
  std::vector<std::string> categories;

  friend bool operator==(const FeatureInfo&, const FeatureInfo&) = default;
};

/// Immutable feature matrix with its target series and (optional) day index.
///
/// Categorical features are stored as small integer codes; the label for
/// code c is `features()[j].categories[c]`.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<FeatureInfo> features, Matrix x, std::vector<double> y,
          std::vector<std::int64_t> time = {}, std::string target_name = "target",
          std::string time_name = "");

  std::size_t n_rows() const noexcept { return y_.size(); }
  std::size_t n_features() const noexcept { return features_.size(); }
  bool empty() const noexcept { return y_.empty(); }

  const std::vector<FeatureInfo>& features() const noexcept { return features_; }
  const Matrix& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }
  const std::vector<std::int64_t>& time() const noexcept { return time_; }
  bool has_time() const noexcept { return !time_.empty(); }
  const std::string& target_name() const noexcept { return target_name_; }
  const std::string& time_name() const noexcept { return time_name_; }

  std::vector<std::string> feature_names() const;
  std::optional<std::size_t> feature_index(const std::string& name) const;
  std::vector<std::size_t> categorical_features() const;

  /// Rows [begin, end).
  Dataset slice(std::size_t begin, std::size_t end) const;
  /// Rows by index; indices must be increasing when a time index is present.
  Dataset take_rows(std::span<const std::size_t> idx) const;
  Dataset select_features(std::span<const std::size_t> idx) const;
  Dataset drop_features(std::span<const std::size_t> idx) const;
  Dataset with_target(std::vector<double> y) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<FeatureInfo> features_;
  Matrix x_;
  std::vector<double> y_;
  std::vector<std::int64_t> time_;
  std::string target_name_ = "target";
  std::string time_name_;
};

/// Category label -> code, per categorical column name.
using CodeMaps = std::map<std::string, std::vector<std::string>>;

/// Read a CSV file against a declared schema. Fails closed on missing columns,
/// empty or unparsable cells and a non-increasing time index (DataError).
/// `known_codes` seeds the categorical code maps (e.g. from a saved model);
/// labels not in the map get new codes in first-appearance order.
Dataset load_csv(const std::filesystem::path& path, std::span<const ColumnSchema> schema,
                 const CodeMaps* known_codes = nullptr);
Dataset parse_csv(const std::string& text, std::span<const ColumnSchema> schema,
                  const CodeMaps* known_codes = nullptr);

/// Header names of a CSV file.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

/// Write time index (ISO date), features, then target; reals in shortest
/// round-trip form.
std::string to_csv(const Dataset& d);
void write_csv(const Dataset& d, const std::filesystem::path& path);

CodeMaps code_maps(const Dataset& d);

/// Days since 1970-01-01 <-> YYYY-MM-DD.
std::int64_t parse_iso_date(const std::string& s);
std::string format_iso_date(std::int64_t day);

struct LagSpec {
  std::vector<int> delays;  // sorted, strictly increasing, each >= 1

  static LagSpec defaults() { return {{1, 2, 3, 7, 14, 28, 364}}; }
  int max_delay() const { return delays.empty() ? 0 : delays.back(); }
};

/// Append lag_<d> = target(t - d) for each delay, looking rows up by day.
/// Rows whose lagged day is absent are dropped.
Dataset build_lagged(const Dataset& d, const LagSpec& lags);

/// Chronological tail split: test = last ceil(test_fraction * n) rows.
std::pair<Dataset, Dataset> temporal_split(const Dataset& d, double test_fraction);

/// Interior quantile edges for one column; midpoints between distinct values
/// when there are no more distinct values than bins.
std::vector<double> quantile_edges(std::span<const double> values, int max_bins);

/// Bin of `v` under right-open intervals: number of edges <= v.
std::uint16_t bin_of(std::span<const double> edges, double v);

struct BinnedDataset {
  Dataset source;
  std::vector<std::vector<double>> bin_edges;      // per feature
  std::vector<std::vector<std::uint16_t>> codes;   // per feature, per row (column-major)
  int max_bins = 255;

  std::size_t n_rows() const { return source.n_rows(); }
  std::size_t n_features() const { return source.n_features(); }
  std::size_t n_bins(std::size_t f) const { return bin_edges[f].size() + 1; }
  /// [lo, hi) covered by bin `code` of feature `f`.
  std::pair<double, double> bin_interval(std::size_t f, std::size_t code) const;
};

BinnedDataset bin_features(const Dataset& d, int max_bins);

}  // namespace stackcast
