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
#include <numeric>
#include <unordered_map>

#include "boost_common.hpp"
#include "hist_grower.hpp"
#include "stackcast/boosting.hpp"
#include "stackcast/error.hpp"

namespace stackcast {

std::vector<double> ordered_target_statistic(std::span<const double> codes,
                                             std::span<const double> targets,
                                             std::span<const std::size_t> sigma, double prior,
                                             double a_ts) {
  if (codes.size() != targets.size() || sigma.size() != codes.size()) {
    throw std::invalid_argument("ordered_target_statistic: length mismatch");
  }
  if (!(a_ts > 0.0)) throw std::invalid_argument("ordered_target_statistic: a_ts must be > 0");
  std::unordered_map<double, std::pair<double, double>> seen;  // code -> (sum, count)
  std::vector<double> out(codes.size());
  for (std::size_t row : sigma) {
    auto& [sum, count] = seen[codes[row]];
    out[row] = (sum + a_ts * prior) / (count + a_ts);
    sum += targets[row];
    count += 1.0;
  }
  return out;
}

PermutationSet PermutationSet::random(std::size_t n_rows, int s, std::uint64_t seed) {
  PermutationSet ps;
  Rng rng(seed);
  for (int r = 0; r < s; ++r) ps.perms.push_back(rng.permutation(n_rows));
  return ps;
}

PermutationSet PermutationSet::identity(std::size_t n_rows) {
  PermutationSet ps;
  ps.perms.emplace_back(n_rows);
  std::iota(ps.perms[0].begin(), ps.perms[0].end(), std::size_t{0});
  return ps;
}

std::vector<double> plain_leaf_updates(std::span<const int> leaf_of_row,
                                       std::span<const double> gradient) {
  if (leaf_of_row.size() != gradient.size()) {
    throw std::invalid_argument("plain_leaf_updates: length mismatch");
  }
  std::unordered_map<int, std::pair<double, double>> acc;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    auto& [sum, count] = acc[leaf_of_row[i]];
    sum += gradient[i];
    count += 1.0;
  }
  std::vector<double> out(gradient.size());
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    const auto& [sum, count] = acc[leaf_of_row[i]];
    out[i] = sum / count;
  }
  return out;
}

std::vector<double> ordered_leaf_updates(std::span<const int> leaf_of_row,
                                         std::span<const double> gradient,
                                         std::span<const std::size_t> sigma) {
  if (leaf_of_row.size() != gradient.size() || sigma.size() != gradient.size()) {
    throw std::invalid_argument("ordered_leaf_updates: length mismatch");
  }
  std::unordered_map<int, std::pair<double, double>> acc;
  std::vector<double> out(gradient.size());
  for (std::size_t row : sigma) {
    auto& [sum, count] = acc[leaf_of_row[row]];
    out[row] = count > 0.0 ? sum / count : 0.0;
    sum += gradient[row];
    count += 1.0;
  }
  return out;
}

namespace {

void check_permutations(const PermutationSet& ps, std::size_t n) {
  if (ps.perms.empty()) throw std::invalid_argument("fit_ordered_boost: no permutations");
  for (const auto& perm : ps.perms) {
    if (perm.size() != n) throw std::invalid_argument("fit_ordered_boost: permutation length");
    std::vector<char> hit(n, 0);
    for (std::size_t r : perm) {
      if (r >= n || hit[r]) throw std::invalid_argument("fit_ordered_boost: not a permutation");
      hit[r] = 1;
    }
  }
}

struct BinnedColumn {
  std::vector<double> edges;
  std::vector<std::uint16_t> codes;
};

BinnedColumn bin_column(std::span<const double> v, int max_bins) {
  BinnedColumn c;
  c.edges = quantile_edges(v, max_bins);
  c.codes.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) c.codes[i] = bin_of(c.edges, v[i]);
  return c;
}

}  // namespace

BoostModel fit_ordered_boost(const Dataset& train, const BoostParams& p) {
  return fit_ordered_boost(
      train, p, PermutationSet::random(train.n_rows(), p.n_permutations, mix_seed(p.seed, 0x5a11)));
}

BoostModel fit_ordered_boost(const Dataset& train, const BoostParams& p,
                             const PermutationSet& perms) {
  p.validate();
  const std::size_t n = train.n_rows();
  if (n == 0) throw DataError("fit_ordered_boost: empty dataset");
  check_permutations(perms, n);
  const std::size_t n_features = train.n_features();
  const std::size_t s = perms.perms.size();
  const auto& y = train.y();
  const double prior = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  std::vector<char> is_cat(n_features, 0);
  for (std::size_t f : train.categorical_features()) is_cat[f] = 1;

  // Numeric columns are binned once; categorical columns once per permutation.
  std::vector<BinnedColumn> numeric(n_features);
  std::vector<std::vector<BinnedColumn>> cat(s, std::vector<BinnedColumn>(n_features));
  std::vector<detail::BinColumns> cols(s);
  for (std::size_t f = 0; f < n_features; ++f) {
    const auto column = train.x().column(f);
    if (!is_cat[f]) {
      numeric[f] = bin_column(column, p.max_bins);
    } else {
      for (std::size_t r = 0; r < s; ++r) {
        const auto ts =
            ordered_target_statistic(column, y, perms.perms[r], prior, p.ts_prior_weight);
        cat[r][f] = bin_column(ts, p.max_bins);
      }
    }
  }
  for (std::size_t r = 0; r < s; ++r) {
    for (std::size_t f = 0; f < n_features; ++f) {
      const BinnedColumn& c = is_cat[f] ? cat[r][f] : numeric[f];
      cols[r].codes.push_back(c.codes.data());
      cols[r].edges.push_back(&c.edges);
    }
  }

  detail::HistTreeParams hp;
  hp.policy = p.grow_policy;
  hp.max_depth = p.max_depth;
  hp.max_leaves = p.max_leaves;
  hp.l2_lambda = p.l2_lambda;
  hp.min_split_gain = p.min_split_gain;
  hp.min_samples_leaf = p.min_samples_leaf;

  BoostModel model;
  model.kind = BoostModel::Kind::ordered;
  model.n_features = n_features;
  model.learning_rate = p.learning_rate;
  model.base_score = prior;
  std::vector<double> f(n, prior), g(n), h(n, 1.0), residual(n);
  std::vector<std::vector<double>> support;  // M_r, ordered mode only
  if (p.mode == BoostMode::ordered) support.assign(s, std::vector<double>(n, prior));
  model.train_loss.push_back(detail::mean_squared_error(f, y));
  std::vector<int> leaf(n);

  Rng rng(mix_seed(p.seed, 0x0bd3));
  for (int t = 0; t < p.n_estimators; ++t) {
    const std::size_t r = s == 1 ? 0 : rng.below(s);
    const auto& current = p.mode == BoostMode::ordered ? support[r] : f;
    for (std::size_t i = 0; i < n; ++i) g[i] = current[i] - y[i];
    const auto rows = detail::sample_rows(n, p.subsample, rng);
    hp.use_feature = detail::sample_features(n_features, p.feature_fraction, rng);
    auto ht = detail::grow_hist_tree(cols[r], rows, g, h, hp);
    for (std::size_t i = 0; i < n; ++i) leaf[i] = detail::leaf_of_row(ht, cols[r], i);

    std::vector<TreeNode> nodes = ht.tree.nodes();
    if (p.mode == BoostMode::ordered) {
      for (std::size_t q = 0; q < s; ++q) {
        auto& m = support[q];
        for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - m[i];
        const auto delta = ordered_leaf_updates(leaf, residual, perms.perms[q]);
        for (std::size_t i = 0; i < n; ++i) m[i] += p.learning_rate * delta[i];
      }
      // Stored leaf values fit the full-model residuals.
      std::vector<double> sum(nodes.size(), 0.0), count(nodes.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        sum[leaf[i]] += y[i] - f[i];
        count[leaf[i]] += 1.0;
      }
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k].is_leaf()) {
          nodes[k].value = count[k] + p.l2_lambda > 0.0 ? sum[k] / (count[k] + p.l2_lambda) : 0.0;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) f[i] += p.learning_rate * nodes[leaf[i]].value;
    model.trees.emplace_back(std::move(nodes));
    model.train_loss.push_back(detail::mean_squared_error(f, y));
  }

  // Prediction-time encodings use every training row.
  for (std::size_t fi = 0; fi < n_features; ++fi) {
    if (!is_cat[fi]) continue;
    CategoryEncoding e;
    e.feature = fi;
    e.prior = prior;
    const std::size_t k = std::max<std::size_t>(train.features()[fi].categories.size(), 1);
    std::vector<double> sum(k, 0.0), count(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto code = static_cast<std::size_t>(train.x()(i, fi));
      if (code >= sum.size()) {
        sum.resize(code + 1, 0.0);
        count.resize(code + 1, 0.0);
      }
      sum[code] += y[i];
      count[code] += 1.0;
    }
    e.encoded.resize(sum.size());
    for (std::size_t c = 0; c < sum.size(); ++c) {
      e.encoded[c] = (sum[c] + p.ts_prior_weight * prior) / (count[c] + p.ts_prior_weight);
    }
    model.encoders.push_back(std::move(e));
  }
  return model;
}

}  // namespace stackcast
