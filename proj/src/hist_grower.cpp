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

#include "hist_grower.hpp"

#include <algorithm>
#include <stdexcept>

namespace stackcast::detail {
namespace {

std::vector<std::size_t> offsets_of(const BinColumns& cols) {
  std::vector<std::size_t> off(cols.edges.size() + 1, 0);
  for (std::size_t f = 0; f < cols.edges.size(); ++f) off[f + 1] = off[f] + cols.edges[f]->size() + 1;
  return off;
}

struct Candidate {
  int feature = -1;
  int bin = -1;
  double gain = 0.0;
};

struct Leaf {
  int node;
  std::size_t begin, end;
  int depth;
  double g, h;
  std::vector<HistBin> hist;
  Candidate best;
};

}  // namespace

std::vector<HistBin> build_histogram(const BinColumns& cols, std::span<const std::size_t> rows,
                                     std::span<const double> g, std::span<const double> h) {
  const auto off = offsets_of(cols);
  std::vector<HistBin> hist(off.back());
  for (std::size_t f = 0; f < cols.codes.size(); ++f) {
    const std::uint16_t* codes = cols.codes[f];
    HistBin* base = hist.data() + off[f];
    for (std::size_t r : rows) {
      HistBin& b = base[codes[r]];
      b.g += g[r];
      b.h += h[r];
      b.n += 1.0;
    }
  }
  return hist;
}

HistTree grow_hist_tree(const BinColumns& cols, std::span<const std::size_t> rows_in,
                        std::span<const double> g, std::span<const double> h,
                        const HistTreeParams& p) {
  if (rows_in.empty()) throw std::invalid_argument("grow_hist_tree: no rows");
  const std::size_t n_features = cols.codes.size();
  const auto off = offsets_of(cols);
  const auto msl = static_cast<double>(std::max(1, p.min_samples_leaf));
  std::vector<std::size_t> rows(rows_in.begin(), rows_in.end());
  std::vector<TreeNode> nodes(1);
  std::vector<int> split_bin(1, -1);

  auto hist_of = [&](std::size_t begin, std::size_t end) {
    std::vector<HistBin> hist(off.back());
    for (std::size_t f = 0; f < n_features; ++f) {
      if (!p.use_feature.empty() && !p.use_feature[f]) continue;
      const std::uint16_t* codes = cols.codes[f];
      HistBin* base = hist.data() + off[f];
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows[i];
        HistBin& b = base[codes[r]];
        b.g += g[r];
        b.h += h[r];
        b.n += 1.0;
      }
    }
    return hist;
  };

  auto find_best = [&](Leaf& leaf) {
    leaf.best = {};
    const double n = static_cast<double>(leaf.end - leaf.begin);
    if (p.max_depth >= 0 && leaf.depth >= p.max_depth) return;
    if (n < 2.0 * msl) return;
    // Rank candidates by the child terms only; the parent term and gamma are
    // the same for every split of this leaf.
    const double lambda = p.l2_lambda;
    double best_score = -1.0;
    double best_gl = 0.0, best_hl = 0.0;
    for (std::size_t f = 0; f < n_features; ++f) {
      if (!p.use_feature.empty() && !p.use_feature[f]) continue;
      const std::size_t nb = off[f + 1] - off[f];
      const HistBin* base = leaf.hist.data() + off[f];
      double gl = 0.0, hl = 0.0, nl = 0.0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += base[b].g;
        hl += base[b].h;
        nl += base[b].n;
        if (nl < msl) continue;
        if (n - nl < msl) break;
        const double gr = leaf.g - gl, hr = leaf.h - hl;
        if (hl + lambda <= 0.0 || hr + lambda <= 0.0) continue;
        const double score = gl * gl / (hl + lambda) + gr * gr / (hr + lambda);
        if (score > best_score) {
          best_score = score;
          best_gl = gl;
          best_hl = hl;
          leaf.best.feature = static_cast<int>(f);
          leaf.best.bin = static_cast<int>(b + 1);
        }
      }
    }
    if (leaf.best.feature < 0) return;
    const double gain =
        split_gain(best_gl, best_hl, leaf.g - best_gl, leaf.h - best_hl, lambda, p.min_split_gain);
    if (gain > 0.0) {
      leaf.best.gain = gain;
    } else {
      leaf.best = {};
    }
  };

  auto totals = [&](std::size_t begin, std::size_t end, double& sg, double& sh) {
    sg = 0.0;
    sh = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      sg += g[rows[i]];
      sh += h[rows[i]];
    }
  };

  std::vector<Leaf> leaves;
  {
    Leaf root{0, 0, rows.size(), 0, 0.0, 0.0, hist_of(0, rows.size()), {}};
    totals(0, rows.size(), root.g, root.h);
    find_best(root);
    leaves.push_back(std::move(root));
  }
  const std::size_t cap =
      p.max_leaves > 0 ? static_cast<std::size_t>(p.max_leaves) : static_cast<std::size_t>(-1);

  while (leaves.size() < cap) {
    // Pick the leaf to split next.
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const Leaf& l = leaves[i];
      if (l.best.feature < 0) continue;
      if (pick == leaves.size()) {
        pick = i;
        continue;
      }
      const Leaf& cur = leaves[pick];
      bool better;
      if (p.policy == GrowPolicy::leaf_wise) {
        better = l.best.gain > cur.best.gain || (l.best.gain == cur.best.gain && l.node < cur.node);
      } else {
        better = l.depth < cur.depth || (l.depth == cur.depth && l.node < cur.node);
      }
      if (better) pick = i;
    }
    if (pick == leaves.size()) break;

    Leaf parent = std::move(leaves[pick]);
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));
    const auto f = static_cast<std::size_t>(parent.best.feature);
    const auto sb = static_cast<std::uint16_t>(parent.best.bin);
    const std::uint16_t* codes = cols.codes[f];
    auto first = rows.begin() + static_cast<std::ptrdiff_t>(parent.begin);
    auto last = rows.begin() + static_cast<std::ptrdiff_t>(parent.end);
    auto mid = std::stable_partition(first, last, [&](std::size_t r) { return codes[r] < sb; });
    const std::size_t split_at = parent.begin + static_cast<std::size_t>(mid - first);

    const int left = static_cast<int>(nodes.size());
    nodes.resize(nodes.size() + 2);
    split_bin.resize(nodes.size(), -1);
    TreeNode& pn = nodes[parent.node];
    pn.feature = parent.best.feature;
    pn.threshold = (*cols.edges[f])[sb - 1];
    pn.gain = parent.best.gain;
    pn.left = left;
    pn.right = left + 1;
    split_bin[parent.node] = sb;

    Leaf l{left, parent.begin, split_at, parent.depth + 1, 0.0, 0.0, {}, {}};
    Leaf r{left + 1, split_at, parent.end, parent.depth + 1, 0.0, 0.0, {}, {}};
    totals(l.begin, l.end, l.g, l.h);
    totals(r.begin, r.end, r.g, r.h);
    Leaf& small = (l.end - l.begin) <= (r.end - r.begin) ? l : r;
    Leaf& large = &small == &l ? r : l;
    small.hist = hist_of(small.begin, small.end);
    large.hist = std::move(parent.hist);
    for (std::size_t i = 0; i < large.hist.size(); ++i) {
      large.hist[i].g -= small.hist[i].g;
      large.hist[i].h -= small.hist[i].h;
      large.hist[i].n -= small.hist[i].n;
    }
    find_best(l);
    find_best(r);
    leaves.push_back(std::move(l));
    leaves.push_back(std::move(r));
  }

  for (const Leaf& leaf : leaves) {
    TreeNode& node = nodes[leaf.node];
    node.value = leaf_newton_value(leaf.g, leaf.h, p.l2_lambda);
    node.n_samples = leaf.end - leaf.begin;
  }
  // Internal nodes: counts only.
  for (std::size_t i = nodes.size(); i-- > 0;) {
    TreeNode& node = nodes[i];
    if (!node.is_leaf()) node.n_samples = nodes[node.left].n_samples + nodes[node.right].n_samples;
  }
  return {Tree(std::move(nodes)), std::move(split_bin)};
}

int leaf_of_row(const HistTree& t, const BinColumns& cols, std::size_t row) {
  const auto& nodes = t.tree.nodes();
  int i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& node = nodes[i];
    i = cols.codes[node.feature][row] >= t.split_bin[i] ? node.right : node.left;
  }
  return i;
}

}  // namespace stackcast::detail
