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


#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stackcast/error.hpp"
#include "stackcast/meta.hpp"
#include "stackcast/metrics.hpp"

using namespace stackcast;

namespace {

std::vector<double> mean_predictor(const Dataset& fit, const Dataset& predict) {
  const double m = std::accumulate(fit.y().begin(), fit.y().end(), 0.0) / static_cast<double>(fit.n_rows());
  return std::vector<double>(predict.n_rows(), m);
}

Dataset targets(const std::vector<double>& y) {
  std::vector<std::vector<double>> rows(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) rows[i] = {static_cast<double>(i)};
  return fixture::numeric(rows, y);
}

Regressor constant_model(double v) {
  TreeNode leaf;
  leaf.value = v;
  return Regressor(LearnerKind::cart, 1, Tree({leaf}));
}

std::vector<LearnerSpec> small_stack() {
  auto specs = default_stack();
  for (auto& s : specs) {
    s.boost.n_estimators = 20;
    s.forest.n_estimators = 5;
  }
  return specs;
}

}  // namespace

TEST_CASE("out-of-fold fixtures") {
  const auto d = targets({1, 1, 3, 3});
  CHECK(oof_predictions(d, mean_predictor, {2, OofMode::contiguous_blocks}) ==
        std::vector<double>{3, 3, 1, 1});
  const auto chain = oof_predictions(d, mean_predictor, {2, OofMode::forward_chain});
  CHECK(chain == std::vector<double>{2, 2, 1, 1});

  const std::vector<double> y{4, 8, 1, 7, 5};
  const auto loo = oof_predictions(targets(y), mean_predictor, {5, OofMode::contiguous_blocks});
  const double total = std::accumulate(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(loo[i] == doctest::Approx((total - y[i]) / 4));

  CHECK_THROWS(oof_predictions(targets({1, 2}), mean_predictor, {3, OofMode::contiguous_blocks}));
  CHECK_THROWS(oof_predictions(targets({1, 2}), mean_predictor, {1, OofMode::contiguous_blocks}));
}

TEST_CASE("block boundaries cover every row once") {
  for (std::size_t n : {5, 17, 100}) {
    for (int k : {2, 3, 5}) {
      std::size_t next = 0;
      for (int b = 0; b < k; ++b) {
        const auto [lo, hi] = oof_block(n, k, b);
        CHECK(lo == next);
        CHECK(hi > lo);
        next = hi;
      }
      CHECK(next == n);
    }
  }
}

TEST_CASE("a block's own targets never reach its predictions") {
  const auto d = fixture::random_regression(
      150, 3, 2, [](const auto& r) { return r[0] + 2 * r[1]; }, 0.1);
  auto spec = LearnerSpec::of(LearnerKind::gbdt);
  spec.boost.n_estimators = 15;
  const OofScheme scheme{5, OofMode::contiguous_blocks};
  const auto base = oof_predictions(d, spec, scheme, 3);
  Rng rng(4);
  for (int b = 0; b < 5; ++b) {
    const auto [lo, hi] = oof_block(d.n_rows(), 5, b);
    auto y = d.y();
    for (std::size_t i = lo; i < hi; ++i) y[i] = rng.normal(0, 50);
    const auto moved = oof_predictions(d.with_target(y), spec, scheme, 3);
    for (std::size_t i = lo; i < hi; ++i) CHECK(moved[i] == base[i]);
  }
}

TEST_CASE("hand-built stacks") {
  StackedModel s;
  s.n_features = 1;
  s.subs = {constant_model(2), constant_model(4)};
  s.master = Regressor(LearnerKind::linear, 2, LinearModel{{0.5, 0.5}, 1.0});
  s.master_kind = MasterKind::linear;
  CHECK(s.predict_row(std::vector<double>{0}) == 4);

  s.subs = {constant_model(1), constant_model(3), constant_model(6), constant_model(10)};
  s.master = Regressor(LearnerKind::linear, 4, LinearModel{{1, 0, 0, 0}, 0});
  CHECK(s.predict_row(std::vector<double>{0}) == 1);
  s.master = Regressor(LearnerKind::linear, 4, LinearModel{{0.25, 0.25, 0.25, 0.25}, 0});
  CHECK(s.predict_row(std::vector<double>{0}) == 5);
  CHECK_THROWS(predict_meta(s, Matrix(1, 3)));
}

TEST_CASE("identity master reproduces the sub-learner") {
  const auto d = fixture::random_regression(200, 2, 5, [](const auto& r) { return r[0]; }, 0.1);
  auto spec = LearnerSpec::of(LearnerKind::random_forest);
  spec.forest.n_estimators = 5;
  StackedModel s;
  s.n_features = 2;
  s.subs = fit_sub_learners(d, {spec}, 1);
  s.master = Regressor(LearnerKind::linear, 1, LinearModel{{1.0}, 0.0});
  CHECK(predict_meta(s, d.x()) == s.subs[0].predict(d.x()));
}

TEST_CASE("linear master on a single strong learner is close to identity") {
  const auto d = fixture::random_regression(
      600, 3, 7, [](const auto& r) { return 5 * r[0] + 3 * r[1] * r[1]; });
  auto spec = LearnerSpec::of(LearnerKind::gbdt);
  spec.boost.n_estimators = 100;
  spec.boost.learning_rate = 0.1;
  MasterSpec master;
  master.kind = MasterKind::linear;
  const auto m = fit_meta(d, {spec}, master, {}, 2);
  const auto& lin = std::get<LinearModel>(m.master.model());
  CHECK(lin.weights[0] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("stack fit and serialization") {
  const auto d = fixture::random_regression(
      300, 4, 8, [](const auto& r) { return 2 * r[0] + std::sin(4 * r[1]); }, 0.1);
  const auto [train, test] = temporal_split(d, 0.25);
  for (MasterKind k : {MasterKind::mlp, MasterKind::linear, MasterKind::ridge}) {
    MasterSpec master;
    master.kind = k;
    const auto m = fit_meta(train, small_stack(), master, {}, 5);
    CHECK(m.subs.size() == 4);
    const auto p = predict_meta(m, test.x());
    CHECK(p == predict_meta(m, test.x()));
    CHECK(pearson_r(p, test.y()) > 0.8);
    const auto back = StackedModel::from_json(nlohmann::json::parse(m.to_json().dump()));
    CHECK(predict_meta(back, test.x()) == p);
  }
}

TEST_CASE("meta features carry the learner order") {
  const auto d = fixture::random_regression(120, 2, 9, [](const auto& r) { return r[0]; }, 0.1);
  const auto specs = small_stack();
  const auto meta = build_meta_features(d, specs, {}, 4);
  CHECK(meta.cols() == 4);
  CHECK(meta.column(2) == oof_predictions(d, specs[2], {}, mix_seed(4, 2)));
}

TEST_CASE("stack validation") {
  auto specs = small_stack();
  specs.push_back(specs[0]);
  CHECK_THROWS_AS(validate_stack(specs), ConfigError);
  CHECK_THROWS_AS(validate_stack({LearnerSpec::of(LearnerKind::mlp)}), ConfigError);
  CHECK_THROWS_AS(validate_stack({}), ConfigError);
}
