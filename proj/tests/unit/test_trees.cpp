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
#include <limits>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stackcast/error.hpp"
#include "stackcast/trees.hpp"

using namespace stackcast;

namespace {

double train_mse(const Tree& t, const Dataset& d) {
  double s = 0.0;
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    const double e = t.predict_row(d.x().row(r)) - d.y()[r];
    s += e * e;
  }
  return s / static_cast<double>(d.n_rows());
}

// Every internal node's rows, found by replaying the training rows.
void check_split_ranges(const Tree& t, const Dataset& d) {
  const auto& nodes = t.nodes();
  std::vector<double> lo(nodes.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(nodes.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    int i = 0;
    while (!nodes[i].is_leaf()) {
      const double v = d.x()(r, static_cast<std::size_t>(nodes[i].feature));
      lo[i] = std::min(lo[i], v);
      hi[i] = std::max(hi[i], v);
      i = v >= nodes[i].threshold ? nodes[i].right : nodes[i].left;
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    CHECK(nodes[i].threshold >= lo[i]);
    CHECK(nodes[i].threshold <= hi[i]);
  }
}

}  // namespace

TEST_CASE("cart fixtures") {
  const auto pair = fixture::numeric({{0}, {1}}, {0, 1});
  const Tree t = fit_cart(pair, {1, 2, 1});
  REQUIRE(t.size() == 3);
  CHECK(t.nodes()[0].threshold == 0.5);
  CHECK(t.predict_row(std::vector<double>{0}) == 0);
  CHECK(t.predict_row(std::vector<double>{1}) == 1);
  CHECK(train_mse(t, pair) == 0);

  const auto flat = fixture::numeric({{0}, {1}, {2}}, {4, 4, 4});
  const Tree c = fit_cart(flat, {});
  CHECK(c.size() == 1);
  CHECK(c.predict_row(std::vector<double>{9}) == 4);

  CHECK_THROWS(fit_cart(fixture::numeric({}, {}), {}));
}

TEST_CASE("cart on two-feature interaction grids") {
  // Balanced XOR: no single axis split reduces variance, so a greedy grower
  // stops at the root.
  const auto xr = fixture::numeric({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
  const Tree root = fit_cart(xr, {2, 2, 1});
  CHECK(root.size() == 1);
  CHECK(root.predict_row(std::vector<double>{0, 0}) == 0.5);

  // Interaction with an unbalanced corner: depth 2 fits exactly.
  const auto and_like = fixture::numeric({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 3});
  const Tree t = fit_cart(and_like, {2, 2, 1});
  CHECK(train_mse(t, and_like) == 0);
  CHECK(t.depth() == 2);
}

TEST_CASE("unlimited cart interpolates distinct rows") {
  const auto d = fixture::random_regression(300, 3, 11, [](const auto& r) { return r[0] * r[1]; },
                                            0.3);
  const Tree t = fit_cart(d, {});
  CHECK(train_mse(t, d) <= 1e-12);
  for (const auto& node : t.nodes()) {
    if (!node.is_leaf()) CHECK(node.gain > 0);
    if (node.is_leaf()) CHECK(std::isfinite(node.value));
  }
}

TEST_CASE("manual descent goes right at or above the threshold") {
  std::vector<TreeNode> nodes(3);
  nodes[0].feature = 0;
  nodes[0].threshold = 3;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].value = -1;
  nodes[2].value = 7;
  const Tree t(nodes);
  CHECK(t.predict_row(std::vector<double>{5}) == 7);
  CHECK(t.predict_row(std::vector<double>{3}) == 7);
  CHECK(t.predict_row(std::vector<double>{2.9}) == -1);

  Forest one;
  one.trees = {t};
  one.n_features = 1;
  CHECK(predict_forest_row(one, std::vector<double>{5}) == 7);
  CHECK_THROWS_AS(predict_forest(one, Matrix(1, 2)), DataError);
}

TEST_CASE("forest averages its trees") {
  auto leaf = [](double v) {
    TreeNode n;
    n.value = v;
    return Tree({n});
  };
  Forest f;
  f.trees = {leaf(2), leaf(4)};
  f.n_features = 1;
  CHECK(predict_forest_row(f, std::vector<double>{0}) == 3);
}

TEST_CASE("forest properties") {
  const auto d = fixture::random_regression(
      400, 5, 5, [](const auto& r) { return 3 * r[0] + std::sin(6 * r[1]); }, 0.2);
  const auto probe = fixture::random_regression(50, 5, 99, [](const auto&) { return 0.0; });
  const double ymin = *std::min_element(d.y().begin(), d.y().end());
  const double ymax = *std::max_element(d.y().begin(), d.y().end());
  for (ForestMode mode : {ForestMode::random_forest, ForestMode::extra_trees}) {
    ForestParams p;
    p.n_estimators = 12;
    p.max_features = 0.6;
    p.mode = mode;
    p.seed = 17;
    const Forest a = fit_forest(d, p);
    const Forest b = fit_forest(d, p);
    CHECK(predict_forest(a, probe.x()) == predict_forest(b, probe.x()));
    for (std::size_t r = 0; r < probe.n_rows(); ++r) {
      const double pr = predict_forest_row(a, probe.x().row(r));
      CHECK(pr >= ymin);
      CHECK(pr <= ymax);
      double total = 0.0;
      for (const auto& t : a.trees) total += t.predict_row(probe.x().row(r));
      CHECK(pr == total / static_cast<double>(a.trees.size()));
    }
    const auto imp = impurity_importance(a);
    double s = 0.0;
    for (double v : imp) {
      CHECK(v >= 0);
      s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("extra-trees thresholds stay inside each node's observed range") {
  const auto d = fixture::random_regression(200, 4, 21, [](const auto& r) { return r[0] + r[2]; },
                                            0.1);
  ForestParams p;
  p.n_estimators = 5;
  p.max_features = 1.0;
  p.mode = ForestMode::extra_trees;
  p.seed = 3;
  for (const auto& t : fit_forest(d, p).trees) check_split_ranges(t, d);
}

TEST_CASE("single-tree forest equals its tree") {
  const auto d = fixture::random_regression(120, 3, 8, [](const auto& r) { return r[1]; }, 0.1);
  ForestParams p;
  p.n_estimators = 1;
  p.mode = ForestMode::extra_trees;
  p.seed = 4;
  const Forest f = fit_forest(d, p);
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    CHECK(predict_forest_row(f, d.x().row(r)) == f.trees[0].predict_row(d.x().row(r)));
  }
}

TEST_CASE("importance") {
  const auto single = fixture::random_regression(100, 1, 2, [](const auto& r) { return r[0]; });
  const auto imp1 = impurity_importance(fit_cart(single, {3, 2, 1}), 1);
  CHECK(imp1 == std::vector<double>{1.0});

  // Stumps on a target driven by feature 0 never touch feature 2.
  const auto d = fixture::random_regression(200, 3, 4, [](const auto& r) { return r[0] > 0.5; });
  ForestParams stump;
  stump.n_estimators = 8;
  stump.max_depth = 1;
  stump.seed = 1;
  const auto imp = impurity_importance(fit_forest(d, stump));
  CHECK(imp[2] == 0.0);

  Tree lone({TreeNode{}});
  CHECK(impurity_importance(lone, 3) == std::vector<double>{0, 0, 0});

  // Copy of the target beats pure noise.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows(200, std::vector<double>(2));
    std::vector<double> y(200);
    for (std::size_t i = 0; i < 200; ++i) {
      y[i] = rng.normal();
      rows[i] = {y[i], rng.normal()};
    }
    ForestParams p;
    p.n_estimators = 10;
    p.max_features = 1.0;
    p.seed = seed;
    const auto w = impurity_importance(fit_forest(fixture::numeric(rows, y), p));
    CHECK(w[0] > w[1]);
  }
}

TEST_CASE("parameter validation") {
  ForestParams p;
  p.n_estimators = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.min_samples_split = 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.max_features = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(parse_forest_mode(to_string(ForestMode::extra_trees)) == ForestMode::extra_trees);
}

TEST_CASE("tree json round trip") {
  const auto d = fixture::random_regression(80, 2, 6, [](const auto& r) { return r[0]; }, 0.3);
  const Tree t = fit_cart(d, {4, 2, 1});
  CHECK(Tree::from_json(t.to_json()) == t);
}
