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

#include "stackcast/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "stackcast/error.hpp"
#include "stackcast/report.hpp"

namespace stackcast {

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::numeric:
      return "numeric";
    case ColumnKind::categorical:
      return "categorical";
    case ColumnKind::binary:
      return "binary";
  }
  return "numeric";
}

std::string to_string(ColumnRole role) {
  switch (role) {
    case ColumnRole::feature:
      return "feature";
    case ColumnRole::target:
      return "target";
    case ColumnRole::time_index:
      return "time-index";
    case ColumnRole::ignored:
      return "ignored";
  }
  return "feature";
}

ColumnKind parse_column_kind(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "binary") return ColumnKind::binary;
  throw ConfigError("unknown column kind '" + s + "'");
}

ColumnRole parse_column_role(const std::string& s) {
  if (s == "feature") return ColumnRole::feature;
  if (s == "target") return ColumnRole::target;
  if (s == "time-index" || s == "time_index") return ColumnRole::time_index;
  if (s == "ignored") return ColumnRole::ignored;
  throw ConfigError("unknown column role '" + s + "'");
}

void validate_schema(std::span<const ColumnSchema> schema) {
  std::set<std::string> names;
  int targets = 0;
  int times = 0;
  for (const auto& c : schema) {
    if (c.name.empty()) throw ConfigError("schema: empty column name");
    if (!names.insert(c.name).second) throw ConfigError("schema: duplicate column '" + c.name + "'");
    if (c.role == ColumnRole::target) ++targets;
    if (c.role == ColumnRole::time_index) ++times;
  }
  if (targets != 1) {
    throw ConfigError("schema: expected exactly one target column, found " + std::to_string(targets));
  }
  if (times > 1) throw ConfigError("schema: more than one time-index column");
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<FeatureInfo> features, Matrix x, std::vector<double> y,
                 std::vector<std::int64_t> time, std::string target_name, std::string time_name)
    : features_(std::move(features)),
      x_(std::move(x)),
      y_(std::move(y)),
      time_(std::move(time)),
      target_name_(std::move(target_name)),
      time_name_(std::move(time_name)) {
  if (x_.rows() != y_.size()) {
    throw std::invalid_argument("Dataset: feature matrix has " + std::to_string(x_.rows()) +
                                " rows but target has " + std::to_string(y_.size()));
  }
  if (x_.cols() != features_.size() && !(x_.rows() == 0 && x_.cols() == 0)) {
    throw std::invalid_argument("Dataset: matrix width does not match feature list");
  }
  if (x_.rows() == 0 && x_.cols() != features_.size()) x_ = Matrix(0, features_.size());
  if (!time_.empty() && time_.size() != y_.size()) {
    throw std::invalid_argument("Dataset: time index length does not match rows");
  }
  for (std::size_t i = 1; i < time_.size(); ++i) {
    if (time_[i] <= time_[i - 1]) throw DataError("Dataset: time index is not strictly increasing");
  }
  for (double v : x_.data()) {
    if (std::isnan(v)) throw DataError("Dataset: NaN in feature matrix");
  }
  for (double v : y_) {
    if (std::isnan(v)) throw DataError("Dataset: NaN in target");
  }
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

std::optional<std::size_t> Dataset::feature_index(const std::string& name) const {
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<std::size_t> Dataset::categorical_features() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j].kind == ColumnKind::categorical) out.push_back(j);
  }
  return out;
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > n_rows()) throw std::out_of_range("Dataset::slice: bad row range");
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  return take_rows(idx);
}

Dataset Dataset::take_rows(std::span<const std::size_t> idx) const {
  std::vector<double> y(idx.size());
  std::vector<std::int64_t> t;
  if (has_time()) t.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= n_rows()) throw std::out_of_range("Dataset::take_rows: row out of range");
    y[i] = y_[idx[i]];
    if (has_time()) t[i] = time_[idx[i]];
  }
  return Dataset(features_, x_.take_rows(idx), std::move(y), std::move(t), target_name_, time_name_);
}

Dataset Dataset::select_features(std::span<const std::size_t> idx) const {
  std::vector<FeatureInfo> f;
  for (std::size_t j : idx) {
    if (j >= n_features()) throw std::out_of_range("Dataset::select_features: feature out of range");
    f.push_back(features_[j]);
  }
  return Dataset(std::move(f), x_.take_cols(idx), y_, time_, target_name_, time_name_);
}

Dataset Dataset::drop_features(std::span<const std::size_t> idx) const {
  std::set<std::size_t> drop(idx.begin(), idx.end());
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < n_features(); ++j) {
    if (!drop.count(j)) keep.push_back(j);
  }
  return select_features(keep);
}

Dataset Dataset::with_target(std::vector<double> y) const {
  return Dataset(features_, x_, std::move(y), time_, target_name_, time_name_);
}

// ---------------------------------------------------------------------------
// Dates

std::int64_t parse_iso_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  char dash1 = 0, dash2 = 0;
  std::istringstream in(s);
  in >> y >> dash1 >> m >> dash2 >> d;
  if (!in || dash1 != '-' || dash2 != '-' || !in.eof()) {
    throw std::invalid_argument("not an ISO-8601 date: '" + s + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date: '" + s + "'");
  return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::string format_iso_date(std::int64_t day) {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string cell_ref(std::size_t line_no, const std::string& column) {
  return "row " + std::to_string(line_no) + ", column '" + column + "'";
}

std::int64_t parse_time_cell(const std::string& cell) {
  if (cell.find('-', 1) != std::string::npos) return parse_iso_date(cell);
  const double v = parse_real(cell);
  if (v != std::floor(v)) throw std::invalid_argument("time index must be a date or integer");
  return static_cast<std::int64_t>(v);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Dataset parse_csv(const std::string& text, std::span<const ColumnSchema> schema,
                  const CodeMaps* known_codes) {
  validate_schema(schema);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV: missing header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);  // BOM
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!column_of.emplace(header[c], c).second) {
      throw DataError("CSV: duplicate header column '" + header[c] + "'");
    }
  }
  std::set<std::string> declared;
  for (const auto& s : schema) declared.insert(s.name);
  for (const auto& h : header) {
    if (!declared.count(h)) throw DataError("CSV: column '" + h + "' is not declared in the schema");
  }

  std::vector<FeatureInfo> features;
  std::vector<std::size_t> feature_cols;
  std::size_t target_col = 0;
  std::optional<std::size_t> time_col;
  std::string target_name, time_name;
  for (const auto& s : schema) {
    auto it = column_of.find(s.name);
    if (it == column_of.end()) throw DataError("CSV: missing column '" + s.name + "'");
    switch (s.role) {
      case ColumnRole::feature: {
        FeatureInfo fi{s.name, s.kind, {}};
        if (s.kind == ColumnKind::categorical && known_codes) {
          if (auto k = known_codes->find(s.name); k != known_codes->end()) fi.categories = k->second;
        }
        features.push_back(std::move(fi));
        feature_cols.push_back(it->second);
        break;
      }
      case ColumnRole::target:
        target_col = it->second;
        target_name = s.name;
        break;
      case ColumnRole::time_index:
        time_col = it->second;
        time_name = s.name;
        break;
      case ColumnRole::ignored:
        break;
    }
  }

  std::vector<std::unordered_map<std::string, std::size_t>> code_lookup(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    for (std::size_t c = 0; c < features[j].categories.size(); ++c) {
      code_lookup[j].emplace(features[j].categories[c], c);
    }
  }

  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::int64_t> ts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("CSV: row " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    for (auto& c : cells) c = trim(c);
    auto require = [&](std::size_t col) -> const std::string& {
      const std::string& cell = cells[col];
      if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null") {
        throw DataError("CSV: missing value at " + cell_ref(line_no, header[col]));
      }
      return cell;
    };
    auto number = [&](std::size_t col) {
      const std::string& cell = require(col);
      try {
        const double v = parse_real(cell);
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        return v;
      } catch (const std::invalid_argument&) {
        throw DataError("CSV: cannot parse '" + cell + "' as a number at " +
                        cell_ref(line_no, header[col]));
      }
    };

    for (std::size_t j = 0; j < features.size(); ++j) {
      const std::size_t col = feature_cols[j];
      switch (features[j].kind) {
        case ColumnKind::numeric:
          xs.push_back(number(col));
          break;
        case ColumnKind::binary: {
          const double v = number(col);
          if (v != 0.0 && v != 1.0) {
            throw DataError("CSV: binary column holds '" + cells[col] + "' at " +
                            cell_ref(line_no, header[col]));
          }
          xs.push_back(v);
          break;
        }
        case ColumnKind::categorical: {
          const std::string& label = require(col);
          auto [it, inserted] = code_lookup[j].emplace(label, features[j].categories.size());
          if (inserted) features[j].categories.push_back(label);
          xs.push_back(static_cast<double>(it->second));
          break;
        }
      }
    }
    ys.push_back(number(target_col));
    if (time_col) {
      const std::string& cell = require(*time_col);
      try {
        ts.push_back(parse_time_cell(cell));
      } catch (const std::invalid_argument&) {
        throw DataError("CSV: cannot parse time index '" + cell + "' at " +
                        cell_ref(line_no, header[*time_col]));
      }
      if (ts.size() > 1 && ts.back() <= ts[ts.size() - 2]) {
        throw DataError("CSV: time index not strictly increasing at " +
                        cell_ref(line_no, header[*time_col]));
      }
    }
  }
  const std::size_t n = ys.size();
  return Dataset(std::move(features), Matrix(n, feature_cols.size(), std::move(xs)), std::move(ys),
                 std::move(ts), target_name, time_name);
}

Dataset load_csv(const std::filesystem::path& path, std::span<const ColumnSchema> schema,
                 const CodeMaps* known_codes) {
  if (!std::filesystem::exists(path)) throw DataError("CSV: file not found: " + path.string());
  return parse_csv(read_text(path), schema, known_codes);
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("CSV: file not found: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV: missing header row in " + path.string());
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  return header;
}

std::string to_csv(const Dataset& d) {
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << ',';
    first = false;
  };
  if (d.has_time()) {
    sep();
    out << quote_if_needed(d.time_name().empty() ? "date" : d.time_name());
  }
  for (const auto& f : d.features()) {
    sep();
    out << quote_if_needed(f.name);
  }
  sep();
  out << quote_if_needed(d.target_name());
  out << '\n';
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    first = true;
    if (d.has_time()) {
      sep();
      out << format_iso_date(d.time()[i]);
    }
    for (std::size_t j = 0; j < d.n_features(); ++j) {
      sep();
      const auto& f = d.features()[j];
      if (f.kind == ColumnKind::categorical) {
        out << quote_if_needed(f.categories.at(static_cast<std::size_t>(d.x()(i, j))));
      } else {
        out << format_real(d.x()(i, j));
      }
    }
    sep();
    out << format_real(d.y()[i]);
    out << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& d, const std::filesystem::path& path) { write_text(path, to_csv(d)); }

CodeMaps code_maps(const Dataset& d) {
  CodeMaps out;
  for (const auto& f : d.features()) {
    if (f.kind == ColumnKind::categorical) out[f.name] = f.categories;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lags and splits

Dataset build_lagged(const Dataset& d, const LagSpec& lags) {
  if (lags.delays.empty()) return d;
  if (!d.has_time()) throw std::invalid_argument("build_lagged: dataset has no time index");
  for (std::size_t k = 0; k < lags.delays.size(); ++k) {
    if (lags.delays[k] < 1) throw std::invalid_argument("build_lagged: delays must be >= 1");
    if (k > 0 && lags.delays[k] <= lags.delays[k - 1]) {
      throw std::invalid_argument("build_lagged: delays must be strictly increasing");
    }
  }
  const std::size_t n = d.n_rows();
  if (static_cast<std::size_t>(lags.max_delay()) >= n) {
    throw std::invalid_argument("build_lagged: largest delay " + std::to_string(lags.max_delay()) +
                                " must be smaller than the series length " + std::to_string(n));
  }
  const auto& t = d.time();
  auto row_of_day = [&t](std::int64_t day) -> std::optional<std::size_t> {
    auto it = std::lower_bound(t.begin(), t.end(), day);
    if (it == t.end() || *it != day) return std::nullopt;
    return static_cast<std::size_t>(it - t.begin());
  };

  const std::size_t s = lags.delays.size();
  const std::size_t width = d.n_features() + s;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::int64_t> ts;
  std::vector<double> lag_values(s);
  for (std::size_t i = 0; i < n; ++i) {
    bool complete = true;
    for (std::size_t k = 0; k < s && complete; ++k) {
      auto src = row_of_day(t[i] - lags.delays[k]);
      if (!src) {
        complete = false;
      } else {
        lag_values[k] = d.y()[*src];
      }
    }
    if (!complete) continue;
    auto row = d.x().row(i);
    xs.insert(xs.end(), row.begin(), row.end());
    xs.insert(xs.end(), lag_values.begin(), lag_values.end());
    ys.push_back(d.y()[i]);
    ts.push_back(t[i]);
  }
  std::vector<FeatureInfo> features = d.features();
  for (int delay : lags.delays) features.push_back({"lag_" + std::to_string(delay), ColumnKind::numeric, {}});
  const std::size_t rows = ys.size();
  return Dataset(std::move(features), Matrix(rows, width, std::move(xs)), std::move(ys),
                 std::move(ts), d.target_name(), d.time_name());
}

std::pair<Dataset, Dataset> temporal_split(const Dataset& d, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("temporal_split: test fraction must lie in (0, 1)");
  }
  const std::size_t n = d.n_rows();
  if (n < 2) throw std::invalid_argument("temporal_split: need at least two rows");
  std::size_t n_test = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  return {d.slice(0, n - n_test), d.slice(n - n_test, n)};
}

// ---------------------------------------------------------------------------
// Binning

std::vector<double> quantile_edges(std::span<const double> values, int max_bins) {
  if (max_bins < 2) throw std::invalid_argument("quantile_edges: max_bins must be >= 2");
  if (values.empty()) return {};
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> edges;
  if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
    for (std::size_t k = 1; k < distinct.size(); ++k) {
      edges.push_back(distinct[k - 1] + (distinct[k] - distinct[k - 1]) / 2.0);
    }
    return edges;
  }
  const double n = static_cast<double>(sorted.size());
  for (int k = 1; k < max_bins; ++k) {
    // Linear interpolation between order statistics.
    const double pos = (n - 1.0) * static_cast<double>(k) / static_cast<double>(max_bins);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    const double q = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    if (q <= sorted.front() || q > sorted.back()) continue;
    if (!edges.empty() && q <= edges.back()) continue;
    edges.push_back(q);
  }
  return edges;
}

std::uint16_t bin_of(std::span<const double> edges, double v) {
  return static_cast<std::uint16_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

std::pair<double, double> BinnedDataset::bin_interval(std::size_t f, std::size_t code) const {
  const auto& e = bin_edges.at(f);
  const double lo = code == 0 ? -HUGE_VAL : e.at(code - 1);
  const double hi = code == e.size() ? HUGE_VAL : e.at(code);
  return {lo, hi};
}

BinnedDataset bin_features(const Dataset& d, int max_bins) {
  if (max_bins < 2 || max_bins > 65535) {
    throw std::invalid_argument("bin_features: max_bins must lie in [2, 65535]");
  }
  BinnedDataset out;
  out.source = d;
  out.max_bins = max_bins;
  const std::size_t n = d.n_rows();
  out.bin_edges.resize(d.n_features());
  out.codes.resize(d.n_features());
  for (std::size_t f = 0; f < d.n_features(); ++f) {
    const std::vector<double> col = d.x().column(f);
    out.bin_edges[f] = quantile_edges(col, max_bins);
    out.codes[f].resize(n);
    for (std::size_t i = 0; i < n; ++i) out.codes[f][i] = bin_of(out.bin_edges[f], col[i]);
  }
  return out;
}

}  // namespace stackcast
