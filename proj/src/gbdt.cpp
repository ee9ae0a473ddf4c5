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

#include "boost_common.hpp"
#include "hist_grower.hpp"
#include "stackcast/boosting.hpp"
#include "stackcast/error.hpp"
#include "stackcast/random.hpp"
#include "stackcast/report.hpp"
#include "stackcast/serialize.hpp"

namespace stackcast {

std::string to_string(BoostMode m) { return m == BoostMode::plain ? "plain" : "ordered"; }
std::string to_string(GrowPolicy g) {
  return g == GrowPolicy::leaf_wise ? "leaf_wise" : "depth_wise";
}

BoostMode parse_boost_mode(const std::string& s) {
  if (s == "plain") return BoostMode::plain;
  if (s == "ordered") return BoostMode::ordered;
  throw ConfigError("unknown boosting mode '" + s + "'");
}

GrowPolicy parse_grow_policy(const std::string& s) {
  if (s == "leaf_wise") return GrowPolicy::leaf_wise;
  if (s == "depth_wise") return GrowPolicy::depth_wise;
  throw ConfigError("unknown grow policy '" + s + "'");
}

BoostParams BoostParams::ordered_defaults() {
  BoostParams p;
  p.n_estimators = 1200;
  p.learning_rate = 0.01;
  p.max_depth = 6;
  p.max_leaves = 0;
  p.feature_fraction = 1.0;
  p.l2_lambda = 3.0;
  p.min_samples_leaf = 1;
  p.grow_policy = GrowPolicy::depth_wise;
  return p;
}

void BoostParams::validate() const {
  if (n_estimators < 0) throw ConfigError("boost: n_estimators must be >= 0");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("boost: learning_rate must be >= 0");
  }
  if (max_leaves > 0 && max_leaves < 2) throw ConfigError("boost: max_leaves must be >= 2");
  if (max_leaves <= 0 && max_depth < 0) {
    throw ConfigError("boost: max_leaves and max_depth cannot both be unlimited");
  }
  if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("boost: subsample must be in (0, 1]");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) {
    throw ConfigError("boost: feature_fraction must be in (0, 1]");
  }
  if (!(l2_lambda >= 0.0)) throw ConfigError("boost: l2_lambda must be >= 0");
  if (!(min_split_gain >= 0.0)) throw ConfigError("boost: min_split_gain must be >= 0");
  if (min_samples_leaf < 1) throw ConfigError("boost: min_samples_leaf must be >= 1");
  const double a = goss_top_fraction, b = goss_rand_fraction;
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0) || a + b > 1.0 + 1e-12) {
    throw ConfigError("boost: goss fractions must lie in [0, 1] with a + b <= 1");
  }
  if (a < 1.0 && b == 0.0) throw ConfigError("boost: goss_rand_fraction must be > 0 when a < 1");
  if (max_bins < 2 || max_bins > 65535) throw ConfigError("boost: max_bins must be in [2, 65535]");
  if (n_permutations < 1) throw ConfigError("boost: n_permutations must be >= 1");
  if (!(ts_prior_weight > 0.0)) throw ConfigError("boost: ts_prior_weight must be > 0");
}

double leaf_newton_value(double sum_g, double sum_h, double lambda) {
  if (!(sum_h + lambda > 0.0)) throw NumericError("leaf_newton_value: sum_h + lambda must be > 0");
  return -sum_g / (sum_h + lambda);
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma) {
  if (!(h_left + lambda > 0.0) || !(h_right + lambda > 0.0)) {
    throw NumericError("split_gain: non-positive denominator");
  }
  const double g = g_left + g_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g * g / (h_left + h_right + lambda)) -
         gamma;
}

GossSample goss_sample(std::span<const double> abs_gradients, double a, double b,
                       std::uint64_t seed) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0) || a + b > 1.0 + 1e-12) {
    throw std::invalid_argument("goss_sample: need a, b in [0, 1] and a + b <= 1");
  }
  const std::size_t n = abs_gradients.size();
  GossSample out;
  if (a >= 1.0) {
    out.rows.resize(n);
    std::iota(out.rows.begin(), out.rows.end(), std::size_t{0});
    out.weights.assign(n, 1.0);
    return out;
  }
  if (b == 0.0) throw std::invalid_argument("goss_sample: b = 0 with a < 1");
  const double dn = static_cast<double>(n);
  const std::size_t top = std::min(n, static_cast<std::size_t>(std::ceil(a * dn)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return abs_gradients[i] > abs_gradients[j];
  });
  const std::size_t rest = n - top;
  const std::size_t pick = std::min(rest, static_cast<std::size_t>(std::ceil(b * dn)));
  Rng rng(seed);
  for (std::size_t i = 0; i < pick; ++i) {
    std::swap(order[top + i], order[top + i + rng.below(rest - i)]);
  }
  std::vector<double> weight(n, 0.0);
  for (std::size_t i = 0; i < top; ++i) weight[order[i]] = 1.0;
  const double w = (1.0 - a) / b;
  for (std::size_t i = 0; i < pick; ++i) weight[order[top + i]] = w;
  for (std::size_t i = 0; i < n; ++i) {
    if (weight[i] > 0.0) {
      out.rows.push_back(i);
      out.weights.push_back(weight[i]);
    }
  }
  return out;
}

double CategoryEncoding::encode(double code) const {
  if (!(code >= 0.0) || code != std::floor(code) || code >= static_cast<double>(encoded.size())) {
    return prior;
  }
  return encoded[static_cast<std::size_t>(code)];
}

double BoostModel::predict_row(std::span<const double> x) const {
  if (x.size() != n_features) throw DataError("predict_boost: feature count mismatch");
  std::vector<double> buf;
  if (!encoders.empty()) {
    buf.assign(x.begin(), x.end());
    for (const auto& e : encoders) buf[e.feature] = e.encode(buf[e.feature]);
    x = buf;
  }
  double out = base_score;
  for (const auto& tree : trees) out += learning_rate * tree.predict_row(x);
  return out;
}

std::vector<double> predict_boost(const BoostModel& model, const Matrix& x) {
  if (x.cols() != model.n_features) throw DataError("predict_boost: feature count mismatch");
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.predict_row(x.row(i));
  return out;
}

nlohmann::json BoostModel::to_json() const {
  nlohmann::json trees_j = nlohmann::json::array();
  for (const auto& t : trees) trees_j.push_back(t.to_json());
  nlohmann::json enc = nlohmann::json::array();
  for (const auto& e : encoders) {
    enc.push_back({{"feature", e.feature}, {"prior", encode_real(e.prior)},
                   {"encoded", encode_reals(e.encoded)}});
  }
  return {{"kind", kind == Kind::gbdt ? "gbdt" : "ordered"},
          {"n_features", n_features},
          {"base_score", encode_real(base_score)},
          {"learning_rate", encode_real(learning_rate)},
          {"trees", trees_j},
          {"encoders", enc},
          {"train_loss", encode_reals(train_loss)}};
}

BoostModel BoostModel::from_json(const nlohmann::json& j) {
  BoostModel m;
  m.kind = j.at("kind").get<std::string>() == "gbdt" ? Kind::gbdt : Kind::ordered;
  m.n_features = j.at("n_features").get<std::size_t>();
  m.base_score = decode_real(j.at("base_score"));
  m.learning_rate = decode_real(j.at("learning_rate"));
  for (const auto& t : j.at("trees")) m.trees.push_back(Tree::from_json(t));
  for (const auto& e : j.at("encoders")) {
    m.encoders.push_back({e.at("feature").get<std::size_t>(), decode_real(e.at("prior")),
                          decode_reals(e.at("encoded"))});
  }
  m.train_loss = decode_reals(j.at("train_loss"));
  return m;
}

BoostModel fit_gbdt(const BinnedDataset& train, const BoostParams& p) {
  p.validate();
  const std::size_t n = train.n_rows();
  if (n == 0) throw DataError("fit_gbdt: empty dataset");
  const std::size_t n_features = train.n_features();
  const auto& y = train.source.y();

  detail::BinColumns cols;
  for (std::size_t f = 0; f < n_features; ++f) {
    cols.codes.push_back(train.codes[f].data());
    cols.edges.push_back(&train.bin_edges[f]);
  }
  detail::HistTreeParams hp;
  hp.policy = p.grow_policy;
  hp.max_depth = p.max_depth;
  hp.max_leaves = p.max_leaves;
  hp.l2_lambda = p.l2_lambda;
  hp.min_split_gain = p.min_split_gain;
  hp.min_samples_leaf = p.min_samples_leaf;

  BoostModel model;
  model.kind = BoostModel::Kind::gbdt;
  model.n_features = n_features;
  model.learning_rate = p.learning_rate;
  model.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> f(n, model.base_score), g(n), h(n, 1.0);
  model.train_loss.push_back(detail::mean_squared_error(f, y));

  Rng rng(mix_seed(p.seed, 0x6bd7));
  const bool goss = p.goss_top_fraction < 1.0;
  for (int t = 0; t < p.n_estimators; ++t) {
    for (std::size_t i = 0; i < n; ++i) g[i] = f[i] - y[i];
    std::vector<std::size_t> rows;
    std::vector<double> gw, hw;
    if (goss) {
      std::vector<double> abs_g(n);
      for (std::size_t i = 0; i < n; ++i) abs_g[i] = std::abs(g[i]);
      auto s = goss_sample(abs_g, p.goss_top_fraction, p.goss_rand_fraction, rng.next());
      gw.assign(n, 0.0);
      hw.assign(n, 0.0);
      for (std::size_t k = 0; k < s.rows.size(); ++k) {
        gw[s.rows[k]] = g[s.rows[k]] * s.weights[k];
        hw[s.rows[k]] = s.weights[k];
      }
      rows = std::move(s.rows);
    } else {
      rows = detail::sample_rows(n, p.subsample, rng);
    }
    hp.use_feature = detail::sample_features(n_features, p.feature_fraction, rng);
    auto ht = goss ? detail::grow_hist_tree(cols, rows, gw, hw, hp)
                   : detail::grow_hist_tree(cols, rows, g, h, hp);
    const auto& nodes = ht.tree.nodes();
    for (std::size_t i = 0; i < n; ++i) {
      f[i] += p.learning_rate * nodes[detail::leaf_of_row(ht, cols, i)].value;
    }
    model.trees.push_back(std::move(ht.tree));
    model.train_loss.push_back(detail::mean_squared_error(f, y));
  }
  return model;
}

std::vector<double> impurity_importance(const BoostModel& model) {
  std::vector<double> imp(model.n_features, 0.0);
  for (const auto& tree : model.trees) tree.accumulate_importance(imp);
  normalize_importance(imp);
  return imp;
}

void write_loss_trace(const BoostModel& model, const std::filesystem::path& path) {
  CsvTable t({"iteration", "train_loss"});
  for (std::size_t i = 0; i < model.train_loss.size(); ++i) {
    t.add_row({std::to_string(i), format_real(model.train_loss[i])});
  }
  t.write(path);
}

}  // namespace stackcast
