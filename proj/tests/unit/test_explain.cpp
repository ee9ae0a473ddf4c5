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
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "stackcast/error.hpp"
#include "stackcast/explain.hpp"
#include "stackcast/learner.hpp"

using namespace stackcast;

namespace {

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Matrix random_rows(std::size_t n, std::size_t nf, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, nf);
  for (double& v : m.data()) v = rng.uniform(-1, 1);
  return m;
}

double interacting(std::span<const double> x) {
  return 2 * x[0] - x[1] * x[2] + std::max(0.0, x[3]) + 0.5 * x[0] * x[4];
}

}  // namespace

TEST_CASE("linear fixture") {
  const ModelFn f = [](std::span<const double> x) { return 2 * x[0] + 3 * x[1]; };
  const Matrix bg(1, 2, 0.0);
  const auto r = shap_exact(f, std::vector<double>{1, 1}, bg);
  CHECK(r.values[0] == doctest::Approx(2));
  CHECK(r.values[1] == doctest::Approx(3));
  CHECK(r.base_value == 0);
  CHECK(r.prediction == 5);
}

TEST_CASE("dummy and symmetry axioms") {
  const Matrix bg = random_rows(10, 3, 1);
  const ModelFn ignores = [](std::span<const double> x) { return x[0] * x[2] + 3 * x[0]; };
  const auto r = shap_exact(ignores, std::vector<double>{0.3, -0.8, 0.6}, bg);
  CHECK(r.values[1] == 0.0);

  Matrix sym(4, 2);
  const double pts[4][2] = {{0.1, 0.5}, {0.5, 0.1}, {-0.4, 0.9}, {0.9, -0.4}};
  for (std::size_t i = 0; i < 4; ++i) {
    sym(i, 0) = pts[i][0];
    sym(i, 1) = pts[i][1];
  }
  const ModelFn add = [](std::span<const double> x) { return x[0] + x[1]; };
  const auto s = shap_exact(add, std::vector<double>{0.7, 0.7}, sym);
  CHECK(s.values[0] == doctest::Approx(s.values[1]).epsilon(1e-14));
}

TEST_CASE("exact mode agrees with the ordering oracle") {
  const Matrix bg = random_rows(6, 5, 2);
  std::vector<std::vector<double>> bg_rows;
  for (std::size_t r = 0; r < bg.rows(); ++r) bg_rows.emplace_back(bg.row(r).begin(), bg.row(r).end());
  const Matrix inst = random_rows(4, 5, 3);
  for (std::size_t i = 0; i < inst.rows(); ++i) {
    const std::vector<double> x(inst.row(i).begin(), inst.row(i).end());
    const auto rep = shap_exact(interacting, x, bg);
    const auto ref = oracle::shapley_by_orderings(
        [](const std::vector<double>& z) { return interacting(z); }, x, bg_rows);
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::fabs(rep.values[j] - ref[j]) < 1e-12);
    CHECK(std::fabs(rep.base_value + sum_of(rep.values) - rep.prediction) < 1e-9);
  }
}

TEST_CASE("efficiency holds for every learner kind") {
  const auto d = fixture::random_regression(
      200, 4, 5, [](const auto& r) { return 3 * r[0] + r[1] * r[2] - r[3]; }, 0.1);
  const Matrix bg = background_rows(d.x(), 15, 7);
  for (LearnerKind k : {LearnerKind::cart, LearnerKind::random_forest, LearnerKind::extra_trees,
                        LearnerKind::gbdt, LearnerKind::ordered_boost, LearnerKind::mlp,
                        LearnerKind::linear, LearnerKind::ridge}) {
    auto spec = LearnerSpec::of(k);
    spec.forest.n_estimators = 5;
    spec.boost.n_estimators = 20;
    spec.arch = MlpArch{{8}};
    spec.mlp.max_epochs = 5;
    const auto model = fit_learner(d, spec);
    const ModelFn f = [&](std::span<const double> x) { return model.predict_row(x); };
    for (std::size_t i = 0; i < 5; ++i) {
      const auto rep = shap_exact(f, d.x().row(i), bg);
      CHECK(std::fabs(rep.base_value + sum_of(rep.values) - rep.prediction) < 1e-9);
    }
  }
}

TEST_CASE("a feature no tree splits on gets zero attribution") {
  const auto d = fixture::random_regression(150, 3, 8, [](const auto& r) { return r[0] > 0.4; });
  auto spec = LearnerSpec::of(LearnerKind::random_forest);
  spec.forest.n_estimators = 4;
  spec.forest.max_depth = 1;
  spec.forest.max_features = 1.0;
  const auto model = fit_learner(d, spec);
  const auto imp = *model.importance();
  const ModelFn f = [&](std::span<const double> x) { return model.predict_row(x); };
  const Matrix bg = background_rows(d.x(), 10, 1);
  for (std::size_t j = 0; j < 3; ++j) {
    if (imp[j] != 0.0) continue;
    for (std::size_t i = 0; i < 5; ++i) CHECK(shap_exact(f, d.x().row(i), bg).values[j] == 0.0);
  }
  CHECK(imp[1] == 0.0);
}

TEST_CASE("sampled estimator") {
  const Matrix bg = random_rows(8, 5, 4);
  const std::vector<double> x{0.9, -0.7, 0.4, 0.8, -0.2};
  const auto exact = shap_exact(interacting, x, bg);
  const auto est = shap_sampled(interacting, x, bg, 10000, 5);
  double lo = interacting(bg.row(0)), hi = lo;
  for (std::size_t r = 0; r < bg.rows(); ++r) {
    lo = std::min(lo, interacting(bg.row(r)));
    hi = std::max(hi, interacting(bg.row(r)));
  }
  lo = std::min(lo, exact.prediction);
  hi = std::max(hi, exact.prediction);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::fabs(est.values[j] - exact.values[j]) < 0.05 * (hi - lo));

  const auto a = shap_sampled(interacting, x, bg, 50, 9);
  const auto b = shap_sampled(interacting, x, bg, 50, 9);
  CHECK(a.values == b.values);

  const auto one = shap_sampled(interacting, x, bg, 1, 3);
  CHECK(std::fabs(one.base_value + sum_of(one.values) - one.prediction) < 1e-12);
  CHECK_THROWS_AS(shap_sampled(interacting, x, bg, 0, 3), ConfigError);
}

TEST_CASE("exact mode refuses wide inputs") {
  const Matrix bg(1, kMaxExactFeatures + 1, 0.0);
  const std::vector<double> x(kMaxExactFeatures + 1, 1.0);
  CHECK_THROWS_AS(shap_exact([](std::span<const double>) { return 0.0; }, x, bg), ConfigError);
}

TEST_CASE("background rows") {
  const Matrix x = random_rows(30, 2, 5);
  const Matrix b = background_rows(x, 10, 3);
  CHECK(b.rows() == 10);
  CHECK(background_rows(x, 10, 3) == b);
  CHECK(background_rows(x, 100, 3) == x);
}

TEST_CASE("summaries") {
  const Matrix bg = random_rows(10, 3, 6);
  const Matrix rows = random_rows(40, 3, 7);
  const auto flat = shap_summary([](std::span<const double>) { return 2.0; }, rows, bg,
                                 ShapMode::automatic, 10, 1);
  CHECK(flat.mean_abs == std::vector<double>{0, 0, 0});

  const ModelFn f = [](std::span<const double> x) { return x[0] + 2 * x[1] - 0.1 * x[2]; };
  const auto single = shap_summary(f, random_rows(1, 3, 8), bg, ShapMode::exact, 10, 1);
  for (std::size_t j = 0; j < 3; ++j) CHECK(single.mean_abs[j] == std::fabs(single.attributions(0, j)));

  const auto s = shap_summary(f, rows, bg, ShapMode::exact, 10, 1);
  CHECK(s.order == std::vector<std::size_t>{1, 0, 2});
  CHECK(s.mean_abs[1] / s.mean_abs[0] == doctest::Approx(2.0).epsilon(0.25));
  const std::vector<std::string> names{"a", "b", "c"};
  CHECK(s.summary_csv(names).rfind("feature,mean_abs_shap\nb,", 0) == 0);

  const auto sampled = shap_summary(f, rows, bg, ShapMode::sampled, 20, 4);
  CHECK(sampled.attributions.rows() == 40);
  CHECK(parse_shap_mode("auto") == ShapMode::automatic);
}
