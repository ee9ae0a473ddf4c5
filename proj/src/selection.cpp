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


#include "stackcast/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stackcast/error.hpp"
#include "stackcast/metrics.hpp"
#include "stackcast/report.hpp"

namespace stackcast {

namespace {

double safe_r(std::span<const double> pred, std::span<const double> actual) {
  try {
    return pearson_r(pred, actual);
  } catch (const NumericError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

RfeResult rfe(const Dataset& train, const Dataset& valid, const LearnerSpec& spec,
              std::size_t target_k, std::size_t step) {
  const std::size_t p = train.n_features();
  if (valid.n_features() != p) throw DataError("rfe: train and valid feature counts differ");
  if (target_k < 1 || target_k > p) throw ConfigError("rfe: target_k must lie in [1, n_features]");
  if (step < 1) throw ConfigError("rfe: step must be >= 1");
  if (spec.kind == LearnerKind::mlp) throw ConfigError("rfe: learner 'mlp' has no feature importance");

  std::vector<std::size_t> current(p);
  std::iota(current.begin(), current.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> rounds;
  RfeResult result;
  while (true) {
    const Dataset tr = train.select_features(current);
    const Dataset va = valid.select_features(current);
    const Regressor model = fit_learner(tr, spec);
    const auto pred = model.predict(va.x());
    RfeStep s;
    s.n_features = current.size();
    s.valid_r = safe_r(pred, va.y());
    s.valid_mae = mean_absolute_error(va.y(), pred);
    if (current.size() > target_k) {
      const auto imp = model.importance();
      if (!imp) throw ConfigError("rfe: learner '" + to_string(spec.kind) + "' has no feature importance");
      std::vector<std::size_t> order(current.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return (*imp)[a] < (*imp)[b] || ((*imp)[a] == (*imp)[b] && current[a] < current[b]);
      });
      const std::size_t drop = std::min(step, current.size() - target_k);
      std::vector<char> gone(current.size(), 0);
      for (std::size_t i = 0; i < drop; ++i) {
        gone[order[i]] = 1;
        s.eliminated.push_back(current[order[i]]);
      }
      std::vector<std::size_t> next;
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (!gone[i]) next.push_back(current[i]);
      }
      rounds.push_back(s.eliminated);
      result.steps.push_back(std::move(s));
      current = std::move(next);
      continue;
    }
    result.steps.push_back(std::move(s));
    break;
  }
  result.selected = current;
  result.ranking.assign(p, 1);
  const int n_rounds = static_cast<int>(rounds.size());
  for (int r = 0; r < n_rounds; ++r) {
    for (std::size_t f : rounds[static_cast<std::size_t>(r)]) result.ranking[f] = n_rounds - r + 1;
  }
  return result;
}

std::string RfeResult::curve_csv() const {
  CsvTable t({"n_features", "valid_r", "valid_mae", "eliminated"});
  for (const auto& s : steps) {
    t.add_row({std::to_string(s.n_features), format_real(s.valid_r), format_real(s.valid_mae),
               join_indices(s.eliminated)});
  }
  return t.str();
}

std::string RfeResult::ranking_csv(const std::vector<std::string>& feature_names) const {
  if (feature_names.size() != ranking.size()) {
    throw std::invalid_argument("ranking_csv: name count does not match ranking");
  }
  CsvTable t({"feature", "ranking", "selected"});
  for (std::size_t f = 0; f < ranking.size(); ++f) {
    t.add_row({feature_names[f], std::to_string(ranking[f]), ranking[f] == 1 ? "1" : "0"});
  }
  return t.str();
}

std::vector<FeatureSet> resolve_groups(const Dataset& d, const std::vector<FeatureGroup>& groups) {
  std::vector<FeatureSet> out;
  for (const auto& g : groups) {
    FeatureSet s{g.name, {}};
    for (const auto& name : g.features) {
      const auto idx = d.feature_index(name);
      if (!idx) throw ConfigError("ablate: group '" + g.name + "' names unknown feature '" + name + "'");
      s.features.push_back(*idx);
    }
    std::sort(s.features.begin(), s.features.end());
    s.features.erase(std::unique(s.features.begin(), s.features.end()), s.features.end());
    out.push_back(std::move(s));
  }
  return out;
}

double impact_percent(double r_full, double r_ablated) {
  if (r_ablated == 0.0 || !std::isfinite(r_ablated) || !std::isfinite(r_full)) {
    throw NumericError("impact_percent: ablated R must be finite and nonzero");
  }
  return (r_full - r_ablated) / r_ablated * 100.0;
}

AblationReport ablate_groups(const Dataset& train, const Dataset& test,
                             const std::vector<FeatureSet>& groups, const ScoreFn& score) {
  const std::size_t p = train.n_features();
  for (const auto& g : groups) {
    std::vector<char> hit(p, 0);
    std::size_t distinct = 0;
    for (std::size_t f : g.features) {
      if (f >= p) throw ConfigError("ablate: group '" + g.name + "' references feature " + std::to_string(f) + " out of range");
      if (!hit[f]) ++distinct;
      hit[f] = 1;
    }
    if (distinct == p) throw ConfigError("ablate: group '" + g.name + "' covers every feature");
  }
  AblationReport report;
  report.r_full = score(train, test);
  for (const auto& g : groups) {
    AblationRow row;
    row.group = g.name;
    row.excluded = g.features;
    if (g.features.empty()) {
      row.r_ablated = report.r_full;
    } else {
      row.r_ablated = score(train.drop_features(g.features), test.drop_features(g.features));
    }
    row.impact_percent = impact_percent(report.r_full, row.r_ablated);
    report.rows.push_back(std::move(row));
  }
  return report;
}

AblationReport ablate_groups(const Dataset& train, const Dataset& test,
                             const std::vector<FeatureSet>& groups,
                             const std::vector<LearnerSpec>& specs, const MasterSpec& master,
                             const OofScheme& scheme, std::uint64_t seed) {
  auto score = [&](const Dataset& tr, const Dataset& te) {
    const StackedModel m = fit_meta(tr, specs, master, scheme, seed);
    return pearson_r(predict_meta(m, te.x()), te.y());
  };
  return ablate_groups(train, test, groups, score);
}

std::string AblationReport::to_csv() const {
  CsvTable t({"group", "r_full", "r_ablated", "impact_percent"});
  for (const auto& r : rows) {
    t.add_row({r.group, format_real(r_full), format_real(r.r_ablated), format_real(r.impact_percent)});
  }
  return t.str();
}

}  // namespace stackcast
