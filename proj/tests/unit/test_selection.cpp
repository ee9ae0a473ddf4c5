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


#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stackcast/error.hpp"
#include "stackcast/metrics.hpp"
#include "stackcast/selection.hpp"
#include "stackcast/synth.hpp"

using namespace stackcast;

namespace {

// Feature 0 is the target itself, the rest are noise.
std::pair<Dataset, Dataset> copy_and_noise(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(300, std::vector<double>(5));
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    y[i] = rng.normal();
    rows[i][0] = y[i];
    for (std::size_t j = 1; j < 5; ++j) rows[i][j] = rng.normal();
  }
  const auto d = fixture::numeric(rows, y);
  return temporal_split(d, 0.3);
}

LearnerSpec small_forest(std::uint64_t seed) {
  auto s = LearnerSpec::of(LearnerKind::random_forest);
  s.forest.n_estimators = 10;
  s.forest.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("rfe keeps the copied target") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto [train, valid] = copy_and_noise(seed);
    const auto r = rfe(train, valid, small_forest(seed), 1);
    hits += r.selected == std::vector<std::size_t>{0};
  }
  CHECK(hits >= 9);
}

TEST_CASE("rfe bookkeeping") {
  const auto [train, valid] = copy_and_noise(3);
  const auto same = rfe(train, valid, small_forest(1), 5);
  CHECK(same.selected == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(same.ranking == std::vector<int>{1, 1, 1, 1, 1});
  for (const auto& s : same.steps) CHECK(s.eliminated.empty());

  const auto r = rfe(train, valid, small_forest(1), 1, 2);
  CHECK(r.selected.size() == 1);
  std::vector<std::size_t> removed;
  for (const auto& s : r.steps) {
    if (!s.eliminated.empty()) removed.push_back(s.eliminated.size());
  }
  CHECK(removed == std::vector<std::size_t>{2, 2});
  CHECK(r.steps.front().n_features == 5);
  CHECK(r.steps.back().n_features == 1);

  // Every feature appears once: as a survivor or in exactly one round.
  std::multiset<std::size_t> seen(r.selected.begin(), r.selected.end());
  for (const auto& s : r.steps) seen.insert(s.eliminated.begin(), s.eliminated.end());
  CHECK(seen == std::multiset<std::size_t>{0, 1, 2, 3, 4});
  std::vector<int> sorted = r.ranking;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{1, 2, 2, 3, 3});
  for (std::size_t f : r.selected) CHECK(r.ranking[f] == 1);

  CHECK(r.curve_csv().rfind("n_features,valid_r,valid_mae,eliminated\n", 0) == 0);
  CHECK_THROWS_AS(rfe(train, valid, LearnerSpec::of(LearnerKind::mlp), 2), ConfigError);
  CHECK_THROWS(rfe(train, valid, small_forest(1), 0));
}

TEST_CASE("impact formula") {
  CHECK(impact_percent(0.857, 0.857) == 0.0);
  CHECK(impact_percent(0.857, 0.459) == doctest::Approx((0.857 - 0.459) / 0.459 * 100));
  CHECK(std::fabs(impact_percent(0.857, 0.459) - 86.71) < 0.01);
  CHECK(std::fabs(impact_percent(0.857, 0.849) - 0.94) < 0.01);
  CHECK_THROWS_AS(impact_percent(0.8, 0.0), NumericError);
}

TEST_CASE("ablation harness") {
  const auto d = fixture::random_regression(
      300, 4, 6, [](const auto& r) { return 4 * r[0] + r[1]; }, 0.1);
  const auto [train, test] = temporal_split(d, 0.3);
  const ScoreFn score = [](const Dataset& tr, const Dataset& te) {
    auto s = LearnerSpec::of(LearnerKind::linear);
    return pearson_r(fit_learner(tr, s).predict(te.x()), te.y());
  };
  const std::vector<FeatureSet> groups{{"none", {}}, {"main", {0}}, {"noise", {2, 3}}};
  const auto rep = ablate_groups(train, test, groups, score);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].group == "none");
  CHECK(rep.rows[0].impact_percent == 0.0);
  CHECK(rep.rows[0].r_ablated == rep.r_full);
  CHECK(rep.rows[1].impact_percent > rep.rows[2].impact_percent);
  for (const auto& row : rep.rows) {
    CHECK(row.impact_percent == doctest::Approx(impact_percent(rep.r_full, row.r_ablated)));
  }
  CHECK(rep.to_csv().rfind("group,r_full,r_ablated,impact_percent", 0) == 0);
  CHECK_THROWS_AS(ablate_groups(train, test, {{"all", {0, 1, 2, 3}}}, score), ConfigError);
}

TEST_CASE("group resolution") {
  SynthConfig cfg;
  cfg.n_days = 30;
  const auto d = synth_generate(cfg);
  const auto sets = resolve_groups(d, ed_feature_groups());
  CHECK(sets.size() == ed_feature_groups().size());
  for (const auto& s : sets) CHECK_FALSE(s.features.empty());
  CHECK_THROWS(resolve_groups(d, {{"bad", {"no_such_column"}}}));
}
