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

#include "stackcast/synth.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "stackcast/error.hpp"
#include "stackcast/random.hpp"

namespace stackcast {
namespace {

using std::numbers::pi;

constexpr std::array<double, 7> kWeekly{1.0, 0.45, 0.25, 0.15, 0.0, -0.6, -0.35};  // Mon..Sun

struct Poisson {
  const char* name;
  double mean;
  double lo;
  double hi;
  double winter_boost;  // multiplicative seasonal swing of the rate
};

constexpr std::array<Poisson, 13> kPopular{{
    {"copd", 0.5, 0, 5, 0.4},
    {"asthma", 2.19, 0, 20, 0.3},
    {"heart_failure", 0.6, 0, 5, 0.3},
    {"hypertensive", 0.3, 0, 5, 0.0},
    {"cardiovascular", 6.65, 0, 22, 0.15},
    {"endocrine_nutritional", 1.5, 0, 9, 0.0},
    {"metabolic", 0.41, 0, 5, 0.0},
    {"diabetes_mellitus", 0.41, 0, 5, 0.0},
    {"mental_behaviour", 5.5, 0, 21, 0.0},
    {"genitourinary", 6.9, 0, 26, -0.1},
    {"renal_failure", 0.38, 0, 4, 0.0},
    {"self_harm", 0.18, 0, 6, 0.0},
    {"assault", 0.17, 0, 6, -0.2},
}};

constexpr std::array<Poisson, 10> kFrequent{{
    {"icd_R07_4", 7.18, 0, 27, 0.1},
    {"icd_R10_4", 7.13, 0, 26, 0.0},
    {"icd_B34_9", 3.5, 0, 25, 0.6},
    {"icd_J45_9", 2.17, 0, 20, 0.3},
    {"icd_N39_0", 2.0, 0, 12, -0.1},
    {"icd_R11", 1.87, 0, 21, 0.2},
    {"icd_M54_5", 1.6, 0, 9, 0.0},
    {"icd_Z53_1", 10.3, 0, 67, 0.1},
    {"icd_Z09_9", 3.4, 0, 20, 0.0},
    {"icd_S09_9", 1.8, 0, 13, -0.2},
}};

constexpr std::array<const char*, 10> kIcdLabels{"R07.4", "R10.4", "B34.9", "J45.9", "N39.0",
                                                 "R11",   "M54.5", "Z53.1", "Z09.9", "S09.9"};

struct Range {
  const char* name;
  double mean;
  double lo;
  double hi;
};

constexpr std::array<Range, 8> kAge{{
    {"age_0_10", 18.11, 0.18, 35.34},
    {"age_10_20", 12.90, 2.01, 28.90},
    {"age_20_30", 15.83, 4.43, 33.02},
    {"age_30_40", 12.84, 3.92, 23.30},
    {"age_40_50", 10.57, 2.6, 20.86},
    {"age_50_60", 9.17, 0.7, 20.71},
    {"age_60_70", 7.37, 0.0, 18.90},
    {"age_70_plus", 13.20, 1.85, 26.06},
}};

constexpr std::array<Range, 5> kIcdTop{{
    {"icd_1", 14.11, 3, 67},
    {"icd_2", 8.38, 2, 25},
    {"icd_3", 6.37, 2, 18},
    {"icd_4", 5.01, 2, 13},
    {"icd_5", 4.27, 2, 11},
}};

constexpr std::array<Range, 6> kDisposition{{
    {"dis_admit", 31.15, 4.93, 51.08},
    {"dis_home", 59.07, 34.54, 90.35},
    {"dis_dnw", 6.78, 0, 30.67},
    {"dis_tc", 1.87, 0, 9.76},
    {"dis_lor", 0.42, 0, 4.72},
    {"dis_other", 0.54, 0, 6.6},
}};

constexpr std::array<double, 5> kTriageMean{2.0, 15.0, 55.0, 70.0, 20.0};

double clip(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

int season_of(unsigned month) {
  if (month == 12 || month <= 2) return 1;
  if (month <= 5) return 2;
  if (month <= 8) return 3;
  return 4;
}

double annual_phase(std::int64_t day) {
  const std::chrono::sys_days sd{std::chrono::days{day}};
  const std::chrono::year_month_day ymd{sd};
  const auto jan1 = std::chrono::sys_days{ymd.year() / std::chrono::January / 1};
  const double doy = static_cast<double>((sd - jan1).count()) + 1.0;
  return 2.0 * pi * (doy - 15.0) / 365.25;
}

std::vector<std::string> feature_order() {
  std::vector<std::string> names{"year", "month", "day", "weekday", "season",
                                 "min_temp", "max_temp", "mean_temp", "humidity", "precipitation",
                                 "gust_speed", "gust_direction", "wind_speed", "wind_dir_00",
                                 "wind_dir_06", "wind_dir_12", "wind_dir_21", "gender"};
  for (int k = 1; k <= 5; ++k) names.push_back("triage_" + std::to_string(k));
  for (const auto& a : kAge) names.push_back(a.name);
  for (const auto& t : kIcdTop) names.push_back(t.name);
  for (int k = 1; k <= 5; ++k) names.push_back("icd_" + std::to_string(k) + "_code");
  for (const auto& d : kDisposition) names.push_back(d.name);
  for (const auto& p : kPopular) names.push_back(p.name);
  for (const auto& p : kFrequent) names.push_back(p.name);
  return names;
}

ColumnKind kind_of(const std::string& name) {
  if (name == "gender") return ColumnKind::binary;
  if (name.size() > 5 && name.substr(name.size() - 5) == "_code") return ColumnKind::categorical;
  return ColumnKind::numeric;
}

}  // namespace

void SynthConfig::validate(int max_delay) const {
  if (n_days < 2) throw ConfigError("synth: n_days must be >= 2");
  if (static_cast<long long>(n_days) < 2LL * max_delay) {
    throw ConfigError("synth: n_days must be at least twice the largest lag (" +
                      std::to_string(max_delay) + ")");
  }
  for (double a : {trend_amplitude, seasonal_amplitude, climate_amplitude, case_mix_amplitude,
                   noise_amplitude}) {
    if (!(a >= 0.0)) throw ConfigError("synth: amplitudes must be >= 0");
  }
  if (preset != "ed") throw ConfigError("synth: unknown preset '" + preset + "'");
  try {
    (void)parse_iso_date(start_date);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("synth: start_date: ") + e.what());
  }
}

const std::vector<FeatureGroup>& ed_feature_groups() {
  static const std::vector<FeatureGroup> groups = [] {
    std::vector<FeatureGroup> g;
    g.push_back({"temporal", {"year", "month", "day", "weekday", "season"}});
    FeatureGroup disposition{"disposition", {}};
    for (const auto& d : kDisposition) disposition.features.push_back(d.name);
    g.push_back(disposition);
    FeatureGroup age{"age", {}};
    for (const auto& a : kAge) age.features.push_back(a.name);
    g.push_back(age);
    FeatureGroup viral{"popular_diagnosis", {}};
    for (const auto& p : kPopular) viral.features.push_back(p.name);
    g.push_back(viral);
    FeatureGroup top5{"icd_top5_daily", {}};
    for (const auto& t : kIcdTop) top5.features.push_back(t.name);
    for (int k = 1; k <= 5; ++k) top5.features.push_back("icd_" + std::to_string(k) + "_code");
    g.push_back(top5);
    FeatureGroup frequent{"frequent_icd", {}};
    for (const auto& p : kFrequent) frequent.features.push_back(p.name);
    g.push_back(frequent);
    g.push_back({"triage", {"triage_1", "triage_2", "triage_3", "triage_4", "triage_5"}});
    g.push_back({"climate",
                 {"min_temp", "max_temp", "mean_temp", "humidity", "precipitation", "gust_speed",
                  "gust_direction", "wind_speed", "wind_dir_00", "wind_dir_06", "wind_dir_12",
                  "wind_dir_21"}});
    return g;
  }();
  return groups;
}

const std::vector<ColumnRange>& ed_column_ranges() {
  static const std::vector<ColumnRange> ranges = [] {
    std::vector<ColumnRange> r{{"year", 1900, 2200},
                               {"month", 1, 12},
                               {"day", 1, 31},
                               {"weekday", 1, 7},
                               {"season", 1, 4},
                               {"min_temp", -8.1, 26.7},
                               {"max_temp", 3.6, 43.65},
                               {"mean_temp", 0.5, 33.5},
                               {"humidity", 19.43, 99.75},
                               {"precipitation", 0.0, 84.0},
                               {"gust_speed", 9.4, 105.5},
                               {"gust_direction", 1, 360},
                               {"wind_speed", 0.45, 42.8},
                               {"wind_dir_00", 0, 360},
                               {"wind_dir_06", 0, 360},
                               {"wind_dir_12", 0, 360},
                               {"wind_dir_21", 0, 360},
                               {"gender", 0, 1}};
    for (int k = 1; k <= 5; ++k) r.push_back({"triage_" + std::to_string(k), 0, 1e9});
    for (const auto& a : kAge) r.push_back({a.name, a.lo, a.hi});
    for (const auto& t : kIcdTop) r.push_back({t.name, t.lo, t.hi});
    for (const auto& d : kDisposition) r.push_back({d.name, d.lo, d.hi});
    for (const auto& p : kPopular) r.push_back({p.name, p.lo, p.hi});
    for (const auto& p : kFrequent) r.push_back({p.name, p.lo, p.hi});
    return r;
  }();
  return ranges;
}

std::vector<ColumnSchema> ed_schema() {
  std::vector<ColumnSchema> s{{"date", ColumnKind::numeric, ColumnRole::time_index}};
  for (const auto& name : feature_order()) s.push_back({name, kind_of(name), ColumnRole::feature});
  s.push_back({"visits", ColumnKind::numeric, ColumnRole::target});
  return s;
}

Dataset synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> names = feature_order();
  std::vector<FeatureInfo> features;
  for (const auto& n : names) features.push_back({n, kind_of(n), {}});
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < names.size(); ++j) col[names[j]] = j;

  // Per-column label -> code, first-appearance order.
  std::vector<std::unordered_map<std::string, std::size_t>> codes(names.size());
  auto code_for = [&](std::size_t j, const std::string& label) {
    auto [it, inserted] = codes[j].emplace(label, features[j].categories.size());
    if (inserted) features[j].categories.push_back(label);
    return static_cast<double>(it->second);
  };

  const std::size_t n = static_cast<std::size_t>(cfg.n_days);
  const std::int64_t start = parse_iso_date(cfg.start_date);
  Matrix x(n, names.size());
  std::vector<double> y(n);
  std::vector<std::int64_t> t(n);
  Rng rng(mix_seed(cfg.seed, 0x5e7));

  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t day = start + static_cast<std::int64_t>(i);
    t[i] = day;
    const std::chrono::sys_days sd{std::chrono::days{day}};
    const std::chrono::year_month_day ymd{sd};
    const unsigned month = static_cast<unsigned>(ymd.month());
    const unsigned weekday = std::chrono::weekday{sd}.iso_encoding();
    const double phase = annual_phase(day);
    const double summer = std::cos(phase);  // +1 mid-January, -1 mid-July
    const double winter = -summer;
    auto set = [&](const std::string& name, double v) { x(i, col.at(name)) = v; };

    set("year", static_cast<int>(ymd.year()));
    set("month", month);
    set("day", static_cast<unsigned>(ymd.day()));
    set("weekday", weekday);
    set("season", season_of(month));

    const double mean_temp = clip(13.88 + 8.5 * summer + rng.normal(0.0, 3.0), 0.5, 33.5);
    set("mean_temp", mean_temp);
    set("max_temp", clip(mean_temp + 6.9 + rng.normal(0.0, 1.5), 3.6, 43.65));
    set("min_temp", clip(mean_temp - 6.9 + rng.normal(0.0, 1.5), -8.1, 26.7));
    set("humidity", clip(68.27 + 10.0 * winter + rng.normal(0.0, 10.0), 19.43, 99.75));
    const double rain = rng.uniform() < 0.3 ? -5.87 * std::log(1.0 - rng.uniform()) : 0.0;
    set("precipitation", clip(rain, 0.0, 84.0));
    const double gust = clip(37.76 + rng.normal(0.0, 12.0), 9.4, 105.5);
    set("gust_speed", gust);
    set("gust_direction", 1.0 + static_cast<double>(rng.below(360)));
    set("wind_speed", clip(gust * rng.uniform(0.2, 0.45), 0.45, 42.8));
    for (const char* w : {"wind_dir_00", "wind_dir_06", "wind_dir_12", "wind_dir_21"}) {
      set(w, std::floor(rng.uniform(0.0, 360.0) * 10.0) / 10.0);
    }
    set("gender", rng.uniform() < 0.49 ? 1.0 : 0.0);

    for (int k = 0; k < 5; ++k) {
      set("triage_" + std::to_string(k + 1), rng.poisson(kTriageMean[k] * (1.0 + 0.08 * winter)));
    }
    for (const auto& a : kAge) set(a.name, clip(rng.normal(a.mean, 2.0), a.lo, a.hi));

    std::array<double, 5> top{};
    for (int k = 0; k < 5; ++k) top[k] = rng.poisson(kIcdTop[k].mean * (1.0 + 0.1 * winter));
    std::sort(top.begin(), top.end(), std::greater<>());
    for (int k = 0; k < 5; ++k) set(kIcdTop[k].name, clip(top[k], kIcdTop[k].lo, kIcdTop[k].hi));

    // Five distinct leading codes, weighted by their seasonal daily rates.
    std::array<double, 10> weight{};
    for (std::size_t c = 0; c < kFrequent.size(); ++c) {
      weight[c] = kFrequent[c].mean * (1.0 + kFrequent[c].winter_boost * winter);
    }
    for (int k = 0; k < 5; ++k) {
      double total = 0.0;
      for (double w : weight) total += w;
      double u = rng.uniform() * total;
      std::size_t pick = 0;
      while (pick + 1 < weight.size() && (u >= weight[pick] || weight[pick] == 0.0)) {
        u -= weight[pick];
        ++pick;
      }
      weight[pick] = 0.0;
      const std::size_t j = col.at("icd_" + std::to_string(k + 1) + "_code");
      x(i, j) = code_for(j, kIcdLabels[pick]);
    }

    for (const auto& d : kDisposition) {
      set(d.name, clip(rng.normal(d.mean, std::max(0.3, 0.12 * d.mean)), d.lo, d.hi));
    }
    for (const auto& p : kPopular) {
      set(p.name, clip(rng.poisson(p.mean * (1.0 + p.winter_boost * winter)), p.lo, p.hi));
    }
    for (const auto& p : kFrequent) {
      set(p.name, clip(rng.poisson(p.mean * (1.0 + p.winter_boost * winter)), p.lo, p.hi));
    }

    y[i] = 0.0;  // filled below once the row is complete
  }

  Dataset noiseless(features, x, y, t, "visits", "date");
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = synth_ground_truth(cfg, noiseless, i) + cfg.noise_amplitude * rng.normal();
  }
  return Dataset(std::move(features), std::move(x), std::move(y), std::move(t), "visits", "date");
}

double synth_ground_truth(const SynthConfig& cfg, const Dataset& d, std::size_t row) {
  auto value = [&](const char* name) {
    auto j = d.feature_index(name);
    if (!j) throw DataError(std::string("synth_ground_truth: dataset lacks column '") + name + "'");
    return d.x()(row, *j);
  };
  const std::int64_t start = parse_iso_date(cfg.start_date);
  const double years = static_cast<double>(d.time().at(row) - start) / 365.25;
  const double phase = annual_phase(d.time()[row]);
  const auto weekday = static_cast<std::size_t>(value("weekday"));
  const double seasonal = kWeekly.at(weekday - 1) + 0.8 * std::cos(phase - pi);
  const double climate = 0.8 * std::max(0.0, value("max_temp") - 28.0) -
                         0.25 * std::min(value("precipitation"), 20.0) +
                         0.05 * (value("humidity") - 68.27);
  return cfg.base + cfg.trend_amplitude * years + cfg.seasonal_amplitude * seasonal +
         cfg.climate_amplitude * climate + cfg.case_mix_amplitude * (value("icd_1") - 14.11);
}

}  // namespace stackcast
