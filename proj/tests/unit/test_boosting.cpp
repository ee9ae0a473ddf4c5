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
#include "hist_grower.hpp"
#include "stackcast/boosting.hpp"
#include "stackcast/error.hpp"
#include "stackcast/metrics.hpp"

using namespace stackcast;

namespace {

Dataset with_category(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, 2);
  std::vector<double> y(n);
  const double effect[4] = {-2, 0, 1, 4};
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform();
    x(i, 1) = static_cast<double>(rng.below(4));
    y[i] = 3 * x(i, 0) + effect[static_cast<int>(x(i, 1))] + 0.3 * rng.normal();
  }
  std::vector<FeatureInfo> info{{"u", ColumnKind::numeric, {}},
                                {"c", ColumnKind::categorical, {"a", "b", "c", "d"}}};
  return {info, std::move(x), std::move(y)};
}

}  // namespace

TEST_CASE("newton leaf value") {
  CHECK(leaf_newton_value(-4, 2, 0) == 2);
  CHECK(leaf_newton_value(0, 5, 1) == 0);
  double prev = leaf_newton_value(-4, 2, 0);
  for (double lambda : {1.0, 10.0, 100.0, 1e4, 1e8}) {
    const double w = leaf_newton_value(-4, 2, lambda);
    CHECK(w < prev);
    CHECK(w > 0);
    prev = w;
  }
  CHECK(prev < 1e-7);
  CHECK_THROWS_AS(leaf_newton_value(1, 0, 0), NumericError);

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double g = rng.uniform(-10, 10), h = rng.uniform(0.1, 10), l = rng.uniform(0, 5);
    const double w = leaf_newton_value(g, h, l);
    auto q = [&](double v) { return g * v + 0.5 * (h + l) * v * v; };
    CHECK(q(w + 1e-3) >= q(w));
    CHECK(q(w - 1e-3) >= q(w));
  }
}

TEST_CASE("split gain") {
  CHECK(split_gain(-2, 1, 2, 1, 0, 0) == 4);
  CHECK(split_gain(0, 1, 0, 1, 0, 0.7) == -0.7);
  CHECK(split_gain(3, 2, -1, 5, 0.5, 0.1) == split_gain(-1, 5, 3, 2, 0.5, 0.1));
  CHECK_THROWS_AS(split_gain(1, 0, 1, 1, 0, 0), NumericError);
}

TEST_CASE("goss sampling") {
  const std::vector<double> g{5, 4, 1, 1};
  const auto all = goss_sample(g, 1.0, 0.0, 1);
  CHECK(all.rows == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(all.weights == std::vector<double>{1, 1, 1, 1});

  // ceil(0.5 * 4) = 2 top rows and ceil(0.5 * 4) = 2 picks from the two left.
  const auto half = goss_sample(g, 0.5, 0.5, 1);
  CHECK(half.rows == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(half.weights == std::vector<double>{1, 1, 1, 1});

  // A smaller random share keeps one of the tied rows with weight (1-a)/b.
  const auto quarter = goss_sample(g, 0.5, 0.25, 3);
  REQUIRE(quarter.rows.size() == 3);
  CHECK(quarter.rows[0] == 0);
  CHECK(quarter.rows[1] == 1);
  CHECK((quarter.rows[2] == 2 || quarter.rows[2] == 3));
  CHECK(quarter.weights[2] == 2.0);

  const auto rest = goss_sample(g, 0.0, 1.0, 9);
  CHECK(rest.rows.size() == 4);
  CHECK(rest.weights == std::vector<double>{1, 1, 1, 1});

  CHECK_THROWS(goss_sample(g, 0.5, 0.0, 1));
  CHECK_THROWS(goss_sample(g, 0.7, 0.5, 1));
  CHECK(goss_sample(g, 0.25, 0.5, 4).rows == goss_sample(g, 0.25, 0.5, 4).rows);

  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng.below(500);
    std::vector<double> v(n);
    for (double& x : v) x = std::fabs(rng.normal());
    const double a = rng.uniform(0.05, 0.5), b = rng.uniform(0.05, 1 - a);
    const auto s = goss_sample(v, a, b, trial);
    const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
    CHECK(std::fabs(total - static_cast<double>(n)) <= (1 - a) / b + 1.0 + 1e-9);
  }
}

TEST_CASE("histogram bins sum to row totals") {
  const auto d = fixture::random_regression(400, 3, 2, [](const auto& r) { return r[0]; });
  const auto b = bin_features(d, 16);
  detail::BinColumns cols;
  for (std::size_t f = 0; f < 3; ++f) {
    cols.codes.push_back(b.codes[f].data());
    cols.edges.push_back(&b.bin_edges[f]);
  }
  Rng rng(4);
  std::vector<double> g(400), h(400);
  for (std::size_t i = 0; i < 400; ++i) {
    g[i] = rng.normal();
    h[i] = rng.uniform(0.5, 2);
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < 400; ++i) {
    if (rng.uniform() < 0.4) rows.push_back(i);
  }
  const auto hist = detail::build_histogram(cols, rows, g, h);
  std::size_t off = 0;
  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t bin = 0; bin < b.n_bins(f); ++bin) {
      double sg = 0, sh = 0, n = 0;
      for (std::size_t r : rows) {
        if (b.codes[f][r] != bin) continue;
        sg += g[r];
        sh += h[r];
        n += 1;
      }
      CHECK(std::fabs(hist[off + bin].g - sg) < 1e-9);
      CHECK(std::fabs(hist[off + bin].h - sh) < 1e-9);
      CHECK(hist[off + bin].n == n);
    }
    off += b.n_bins(f);
  }
}

TEST_CASE("gbdt behaviour") {
  const auto d = fixture::random_regression(300, 1, 3, [](const auto& r) { return r[0]; });
  BoostParams p;
  p.learning_rate = 0.0;
  p.n_estimators = 5;
  const auto frozen = fit_gbdt(bin_features(d, 255), p);
  const double mean = std::accumulate(d.y().begin(), d.y().end(), 0.0) / 300.0;
  for (double v : predict_boost(frozen, d.x())) CHECK(v == mean);

  p.learning_rate = 0.1;
  p.n_estimators = 50;
  p.min_samples_leaf = 5;
  const auto fit = fit_gbdt(bin_features(d, 255), p);
  CHECK(pearson_r(predict_boost(fit, d.x()), d.y()) > 0.99);

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto noisy = fixture::random_regression(
        500, 4, seed, [](const auto& r) { return std::sin(5 * r[0]) + r[1] * r[2]; }, 0.2);
    BoostParams q;
    q.n_estimators = 200;
    q.learning_rate = 0.1;
    q.max_leaves = 15;
    q.feature_fraction = 1.0;
    q.seed = seed;
    const auto m = fit_gbdt(bin_features(noisy, 64), q);
    REQUIRE(m.train_loss.size() == 201);
    for (std::size_t t = 1; t < m.train_loss.size(); ++t) {
      CHECK(m.train_loss[t] <= m.train_loss[t - 1]);
    }
  }
  CHECK_THROWS(fit_gbdt(bin_features(fixture::numeric({}, {}), 255), p));
}

TEST_CASE("gbdt with goss still fits") {
  const auto d = fixture::random_regression(600, 2, 6, [](const auto& r) { return 2 * r[0]; }, 0.05);
  BoostParams p;
  p.n_estimators = 80;
  p.learning_rate = 0.1;
  p.goss_top_fraction = 0.2;
  p.goss_rand_fraction = 0.1;
  p.seed = 2;
  const auto m = fit_gbdt(bin_features(d, 255), p);
  CHECK(pearson_r(predict_boost(m, d.x()), d.y()) > 0.98);
}

TEST_CASE("ordered target statistic") {
  const std::vector<double> codes{0, 0, 0}, y{1, 1, 0};
  const std::vector<std::size_t> id{0, 1, 2};
  const auto enc = ordered_target_statistic(codes, y, id, 2.0 / 3.0, 1.0);
  CHECK(enc[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(enc[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(enc[2] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));

  const std::vector<double> mixed{3, 1, 3, 2, 1};
  const std::vector<double> t{5, 6, 7, 8, 9};
  const std::vector<std::size_t> sigma{4, 2, 0, 1, 3};
  const auto e = ordered_target_statistic(mixed, t, sigma, 0.25, 2.0);
  CHECK(e[4] == 0.25);  // first of category 1
  CHECK(e[2] == 0.25);  // first of category 3
  CHECK(e[3] == 0.25);  // only row of category 2
  CHECK(e[1] == doctest::Approx((9 + 0.5) / 3));
  CHECK(e[0] == doctest::Approx((7 + 0.5) / 3));
  CHECK_THROWS(ordered_target_statistic(mixed, std::vector<double>{1, 2}, sigma, 0, 1));
}

TEST_CASE("ordered target statistic has no look-ahead") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.below(100);
    std::vector<double> codes(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      codes[i] = static_cast<double>(rng.below(4));
      y[i] = rng.normal();
    }
    const auto sigma = rng.permutation(n);
    const std::size_t pos = rng.below(n);
    const std::size_t row = sigma[pos];
    const double before = ordered_target_statistic(codes, y, sigma, 0.1, 1.0)[row];
    for (std::size_t k = pos + 1; k < n; ++k) y[sigma[k]] = rng.normal(0, 100);
    CHECK(ordered_target_statistic(codes, y, sigma, 0.1, 1.0)[row] == before);
  }
}

TEST_CASE("leaf updates") {
  const std::vector<int> leaf{0, 0};
  const std::vector<double> grad{1, 3};
  CHECK(plain_leaf_updates(leaf, grad) == std::vector<double>{2, 2});

  const std::vector<std::size_t> sigma{1, 0};
  const auto ord = ordered_leaf_updates(leaf, grad, sigma);
  CHECK(ord[1] == 0);  // first in the permutation
  CHECK(ord[0] == 3);

  const std::vector<int> leaves{0, 1, 0, 1, 0};
  const std::vector<double> g{1, 2, 3, 4, 5};
  const std::vector<std::size_t> s{2, 3, 0, 4, 1};
  const auto o = ordered_leaf_updates(leaves, g, s);
  CHECK(o == std::vector<double>{3, 4, 0, 0, 2});
}

TEST_CASE("plain ordered boosting on the identity permutation matches depth-wise gbdt") {
  const auto d = fixture::random_regression(20, 2, 31, [](const auto& r) { return r[0] - r[1]; },
                                            0.1);
  BoostParams p;
  p.n_estimators = 10;
  p.learning_rate = 0.3;
  p.max_depth = 2;
  p.max_leaves = 4;
  p.min_samples_leaf = 2;
  p.feature_fraction = 1.0;
  p.grow_policy = GrowPolicy::depth_wise;
  p.mode = BoostMode::plain;
  const auto ob = fit_ordered_boost(d, p, PermutationSet::identity(20));
  const auto gb = fit_gbdt(bin_features(d, p.max_bins), p);
  CHECK(predict_boost(ob, d.x()) == predict_boost(gb, d.x()));
  CHECK(ob.train_loss == gb.train_loss);
}

TEST_CASE("ordered boosting fits categorical data") {
  const auto d = with_category(800, 3);
  const auto [train, test] = temporal_split(d, 0.25);
  BoostParams p = BoostParams::ordered_defaults();
  p.n_estimators = 100;
  p.learning_rate = 0.1;
  p.seed = 4;
  for (BoostMode mode : {BoostMode::plain, BoostMode::ordered}) {
    p.mode = mode;
    const auto m = fit_ordered_boost(train, p);
    CHECK(m.encoders.size() == 1);
    CHECK(pearson_r(predict_boost(m, test.x()), test.y()) > 0.9);
    CHECK(predict_boost(m, test.x()) == predict_boost(fit_ordered_boost(train, p), test.x()));
  }
  // An unseen category falls back to the prior.
  const auto m = fit_ordered_boost(train, p);
  CHECK(m.encoders[0].encode(17) == m.encoders[0].prior);

  PermutationSet broken;
  broken.perms = {std::vector<std::size_t>(train.n_rows(), 0)};
  CHECK_THROWS(fit_ordered_boost(train, p, broken));
}

TEST_CASE("prediction fixtures") {
  BoostModel m;
  m.n_features = 1;
  m.base_score = 2.5;
  m.learning_rate = 0.5;
  CHECK(predict_boost(m, Matrix(3, 1, 7.0)) == std::vector<double>{2.5, 2.5, 2.5});

  std::vector<TreeNode> zero(3);
  zero[0].feature = 0;
  zero[0].threshold = 1;
  zero[0].left = 1;
  zero[0].right = 2;
  m.trees.push_back(Tree(zero));
  CHECK(predict_boost(m, Matrix(3, 1, 7.0)) == std::vector<double>{2.5, 2.5, 2.5});

  std::vector<TreeNode> step = zero;
  step[1].value = -2;
  step[2].value = 4;
  m.trees = {Tree(step)};
  CHECK(m.predict_row(std::vector<double>{0}) == 1.5);
  CHECK(m.predict_row(std::vector<double>{3}) == 4.5);
  CHECK_THROWS_AS(predict_boost(m, Matrix(1, 2)), DataError);

  const auto back = BoostModel::from_json(m.to_json());
  CHECK(back.predict_row(std::vector<double>{3}) == 4.5);
}

TEST_CASE("parameter validation") {
  BoostParams p;
  p.goss_top_fraction = 0.6;
  p.goss_rand_fraction = 0.6;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.learning_rate = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.n_permutations = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
