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

#include "cart_builder.hpp"
#include "stackcast/error.hpp"
#include "stackcast/trees.hpp"

namespace stackcast {
namespace detail {

namespace {

double midpoint(double a, double b) {
  const double t = a + (b - a) * 0.5;
  return t > a ? t : b;
}

}  // namespace

double SortedFeatures::threshold(std::size_t f, std::size_t lo, std::size_t hi) const {
  return binned ? values[f][hi - 1] : midpoint(values[f][lo], values[f][hi]);
}

SortedFeatures SortedFeatures::build_binned(const Matrix& x, int max_bins) {
  SortedFeatures s;
  s.binned = true;
  s.values.resize(x.cols());
  s.rank.resize(x.cols());
  s.columns.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    s.columns[f] = x.column(f);
    s.values[f] = quantile_edges(s.columns[f], max_bins);
    auto& rank = s.rank[f];
    rank.resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) rank[i] = bin_of(s.values[f], s.columns[f][i]);
  }
  return s;
}

SortedFeatures SortedFeatures::build(const Matrix& x) {
  SortedFeatures s;
  s.values.resize(x.cols());
  s.rank.resize(x.cols());
  s.columns.resize(x.cols());
  std::vector<std::size_t> order(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
    s.columns[f] = x.column(f);
    auto& values = s.values[f];
    auto& rank = s.rank[f];
    rank.assign(x.rows(), 0);
    for (std::size_t i : order) {
      if (values.empty() || values.back() < x(i, f)) values.push_back(x(i, f));
      rank[i] = static_cast<std::uint32_t>(values.size() - 1);
    }
  }
  return s;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class Grower {
 public:
  Grower(const Matrix& x, std::span<const double> y, const SortedFeatures& sorted,
         const GrowParams& p, Rng* rng)
      : x_(x), y_(y), sorted_(sorted), p_(p), rng_(rng), features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    std::size_t widest = 0;
    for (std::size_t f = 0; f < sorted.values.size(); ++f) widest = std::max(widest, sorted.n_levels(f));
    count_.assign(widest, 0);
    sum_.assign(widest, 0.0);
  }

  Tree grow(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    nodes_.clear();
    nodes_.emplace_back();
    struct Work {
      int node;
      std::size_t begin, end;
      int depth;
    };
    std::vector<Work> stack{{0, 0, rows_.size(), 0}};
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      const std::span<std::size_t> rows_here(rows_.data() + w.begin, w.end - w.begin);
      double total = 0.0;
      double lo = y_[rows_here.front()], hi = lo;
      for (std::size_t r : rows_here) {
        total += y_[r];
        lo = std::min(lo, y_[r]);
        hi = std::max(hi, y_[r]);
      }
      const double n = static_cast<double>(rows_here.size());
      const double mean = total / n;
      nodes_[w.node].value = mean;
      nodes_[w.node].n_samples = rows_here.size();

      const bool depth_ok = p_.max_depth < 0 || w.depth < p_.max_depth;
      if (!depth_ok || rows_here.size() < static_cast<std::size_t>(p_.min_samples_split) ||
          rows_here.size() < 2 * static_cast<std::size_t>(p_.min_samples_leaf) || lo == hi) {
        continue;
      }
      double sse = 0.0;
      for (std::size_t r : rows_here) sse += (y_[r] - mean) * (y_[r] - mean);
      const Split s = best_split(rows_here, mean);
      if (s.feature < 0 || !(s.gain > 1e-12 * sse)) continue;

      const auto& column = sorted_.columns[static_cast<std::size_t>(s.feature)];
      auto mid = std::partition(rows_here.begin(), rows_here.end(),
                                [&](std::size_t r) { return column[r] < s.threshold; });
      const std::size_t split_at = w.begin + static_cast<std::size_t>(mid - rows_here.begin());
      const int left = static_cast<int>(nodes_.size());
      nodes_.emplace_back();
      nodes_.emplace_back();
      auto& node = nodes_[w.node];
      node.feature = s.feature;
      node.threshold = s.threshold;
      node.gain = s.gain;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, split_at, w.end, w.depth + 1});
      stack.push_back({left, w.begin, split_at, w.depth + 1});
    }
    return Tree(std::move(nodes_));
  }

 private:
  Split best_split(std::span<const std::size_t> rows, double mean) {
    std::size_t k = features_.size();
    if (p_.n_candidates > 0 && p_.n_candidates < features_.size()) {
      k = p_.n_candidates;
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(features_[i], features_[i + rng_->below(features_.size() - i)]);
      }
      std::sort(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(k));
    }
    Split best;
    const double n = static_cast<double>(rows.size());
    double total = 0.0;
    for (std::size_t r : rows) total += y_[r] - mean;
    const double parent = total * total / n;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t f = features_[i];
      if (p_.rule == SplitRule::best) {
        scan_feature(rows, f, mean, total, parent, best);
      } else {
        random_threshold(rows, f, mean, total, parent, best);
      }
    }
    if (k < features_.size()) std::sort(features_.begin(), features_.end());
    return best;
  }

  void consider(std::size_t n_left, double s_left, std::size_t n, double total, double parent,
                std::size_t f, double threshold, Split& best) const {
    const std::size_t n_right = n - n_left;
    const auto msl = static_cast<std::size_t>(p_.min_samples_leaf);
    if (n_left < msl || n_right < msl) return;
    const double s_right = total - s_left;
    const double gain = s_left * s_left / static_cast<double>(n_left) +
                        s_right * s_right / static_cast<double>(n_right) - parent;
    if (gain > best.gain) best = {static_cast<int>(f), threshold, gain};
  }

  void scan_feature(std::span<const std::size_t> rows, std::size_t f, double mean, double total,
                    double parent, Split& best) {
    const auto& rank = sorted_.rank[f];
    const std::size_t levels = sorted_.n_levels(f);
    if (levels < 2) return;
    const std::size_t n = rows.size();
    if (levels <= 2 * n) {
      for (std::size_t r : rows) {
        ++count_[rank[r]];
        sum_[rank[r]] += y_[r] - mean;
      }
      std::size_t n_left = 0;
      double s_left = 0.0;
      std::size_t prev = levels;
      for (std::size_t v = 0; v < levels; ++v) {
        if (count_[v] == 0) continue;
        if (prev != levels) consider(n_left, s_left, n, total, parent, f, sorted_.threshold(f, prev, v), best);
        n_left += count_[v];
        s_left += sum_[v];
        count_[v] = 0;
        sum_[v] = 0.0;
        prev = v;
      }
      return;
    }
    pairs_.clear();
    for (std::size_t r : rows) pairs_.emplace_back(rank[r], y_[r] - mean);
    std::sort(pairs_.begin(), pairs_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t n_left = 0;
    double s_left = 0.0;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      if (i > 0 && pairs_[i].first != pairs_[i - 1].first) {
        consider(n_left, s_left, n, total, parent, f,
                 sorted_.threshold(f, pairs_[i - 1].first, pairs_[i].first), best);
      }
      ++n_left;
      s_left += pairs_[i].second;
    }
  }

  void random_threshold(std::span<const std::size_t> rows, std::size_t f, double mean,
                        double total, double parent, Split& best) {
    const auto& column = sorted_.columns[f];
    double lo = column[rows.front()], hi = lo;
    for (std::size_t r : rows) {
      lo = std::min(lo, column[r]);
      hi = std::max(hi, column[r]);
    }
    if (lo == hi) return;
    double t = rng_->uniform(lo, hi);
    if (t <= lo) t = hi;  // keep both sides non-empty
    std::size_t n_left = 0;
    double s_left = 0.0;
    for (std::size_t r : rows) {
      if (column[r] < t) {
        ++n_left;
        s_left += y_[r] - mean;
      }
    }
    consider(n_left, s_left, rows.size(), total, parent, f, t, best);
  }

  const Matrix& x_;
  std::span<const double> y_;
  const SortedFeatures& sorted_;
  GrowParams p_;
  Rng* rng_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> count_;
  std::vector<double> sum_;
  std::vector<std::pair<std::uint32_t, double>> pairs_;
};

}  // namespace

Tree grow_tree(const Matrix& x, std::span<const double> y, const SortedFeatures& sorted,
               std::vector<std::size_t> rows, const GrowParams& p, Rng* rng) {
  if (rows.empty()) throw DataError("tree: no training rows");
  if ((p.rule == SplitRule::random || (p.n_candidates > 0 && p.n_candidates < x.cols())) &&
      rng == nullptr) {
    throw std::invalid_argument("grow_tree: random splitting needs an Rng");
  }
  Grower g(x, y, sorted, p, rng);
  return g.grow(std::move(rows));
}

}  // namespace detail

void CartParams::validate() const {
  if (min_samples_split < 2) throw ConfigError("cart: min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw ConfigError("cart: min_samples_leaf must be >= 1");
}

Tree fit_cart(const Dataset& train, const CartParams& p) {
  p.validate();
  if (train.empty()) throw DataError("fit_cart: empty dataset");
  const auto sorted = detail::SortedFeatures::build(train.x());
  std::vector<std::size_t> rows(train.n_rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  detail::GrowParams g{p.max_depth, p.min_samples_split, p.min_samples_leaf, 0,
                       detail::SplitRule::best};
  return detail::grow_tree(train.x(), train.y(), sorted, std::move(rows), g, nullptr);
}

std::vector<double> impurity_importance(const Tree& tree, std::size_t n_features) {
  std::vector<double> imp(n_features, 0.0);
  tree.accumulate_importance(imp);
  normalize_importance(imp);
  return imp;
}

}  // namespace stackcast
